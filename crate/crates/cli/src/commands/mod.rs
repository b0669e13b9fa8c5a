pub mod bench;
pub mod generate;
pub mod iaa;
pub mod meta_eval;
pub mod score;
