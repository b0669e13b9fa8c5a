use super::{EmbeddingBackend, EmbeddingVector};
use crate::error::BackendError;
use crate::segmenter::tokenize;

pub const HASHED_DIM: usize = 256;

const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET_BASIS, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// Bucket of a token in the hashed embedding.
pub fn hashed_bucket(token: &str) -> usize {
    (fnv1a64(token.as_bytes()) % HASHED_DIM as u64) as usize
}

/// Bag-of-tokens embedding: token counts at `fnv1a64(token) mod 256`, L2-normalized.
pub fn hashed_embed(text: &str) -> EmbeddingVector {
    let mut counts = vec![0.0f64; HASHED_DIM];
    for token in tokenize(text) {
        counts[hashed_bucket(&token)] += 1.0;
    }
    EmbeddingVector::from_raw(counts).expect("token counts are finite")
}

/// Offline, deterministic embedding backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashedEmbedder;

impl HashedEmbedder {
    pub const ID: &'static str = "hashed-fnv1a-256";
}

impl EmbeddingBackend for HashedEmbedder {
    fn backend_id(&self) -> &str {
        Self::ID
    }

    fn dim(&self) -> usize {
        HASHED_DIM
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
        Ok(texts.iter().map(|t| hashed_embed(t)).collect())
    }
}
