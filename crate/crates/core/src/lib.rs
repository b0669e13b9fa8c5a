//! Reference-free factual-consistency scoring for long-document summaries.
//!
//! Each summary sentence is compared only against the few source-document
//! snippets most similar to it, so documents of any length can be scored
//! with a fixed number of scorer calls per sentence:
//!
//! ```
//! use ldfs::{score_summary, Document, HashedEmbedder, LexicalScorer, MetricConfig, Segmenter, SummaryRecord};
//!
//! let seg = Segmenter::default();
//! let doc = Document::new("d1", "Cats purr when content. Dogs bark at strangers. Birds sing at dawn.", &seg);
//! let summary = SummaryRecord::new("d1", "sys", "Dogs bark at strangers.", &seg);
//! let report = score_summary(&doc, &summary, &MetricConfig::default(), &HashedEmbedder, &LexicalScorer::default())?;
//! assert_eq!(report.scorer_call_count, 3);
//! # Ok::<(), ldfs::LdfsError>(())
//! ```

pub mod baselines;
pub mod benchmark;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod instrument;
pub mod ldfs;
pub mod remote;
pub mod report;
pub mod retrieval;
pub mod scorer;
pub mod segmenter;
pub mod stats;

pub use crate::baselines::{greedy_embedding_fscore, rouge_l, rouge_n, Baseline, PrfScore};
pub use crate::corpus::{
    load_annotations, load_corpus, AnnotationRecord, AnnotationSet, Corpus, CorpusError, Document, SummaryKey,
    SummaryRecord,
};
pub use crate::embedding::{cosine, embed, hashed_embed, EmbeddingBackend, EmbeddingVector, HashedEmbedder};
pub use crate::error::BackendError;
pub use crate::ldfs::{score_corpus, score_summary, LdfsError, ScoreReport, SentenceResult, SnippetScore};
pub use crate::report::ScoreLine;
pub use crate::retrieval::{build_snippet, retrieve_top_k, MetricConfig, NeighborOffsets, Snippet, TopK};
pub use crate::scorer::{lexical_score, score_pair, truncating_baseline_score, LexicalScorer, ScoreBackend};
pub use crate::segmenter::{split_sentences, tokenize, Segmenter, Sentence};
pub use crate::stats::{kendall_tau_b, krippendorff_alpha, PairedSample, Statistic};
