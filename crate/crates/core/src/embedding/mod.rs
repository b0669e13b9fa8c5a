//! Sentence embeddings and cosine similarity.
//!
//! Every [`EmbeddingVector`] is either unit-norm or the zero vector. The zero
//! vector is the sentinel for text without tokens and has cosine 0 against
//! everything, so degenerate segments never abort a scoring run.

mod hashed;

use thiserror::Error;

pub use hashed::{fnv1a64, hashed_bucket, hashed_embed, HashedEmbedder, HASHED_DIM};

use crate::error::BackendError;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("embedding contains a non-finite value at position {0}")]
    NonFinite(usize),
    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("embedding dimension must be positive")]
    EmptyVector,
}

/// An L2-normalized embedding (or the all-zero sentinel).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    /// Normalizes `values` to unit length. An all-zero input stays zero.
    pub fn from_raw(values: Vec<f64>) -> Result<Self, EmbeddingError> {
        if values.is_empty() {
            return Err(EmbeddingError::EmptyVector);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(EmbeddingError::NonFinite(pos));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(EmbeddingVector(values));
        }
        Ok(EmbeddingVector(values.into_iter().map(|v| v / norm).collect()))
    }

    pub fn zeros(dim: usize) -> Self {
        EmbeddingVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cosine similarity of two normalized vectors, clamped to `[-1, 1]`.
/// Zero vectors have similarity 0 with everything.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EmbeddingError> {
    if a.dim() != b.dim() {
        return Err(EmbeddingError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if a.is_zero() || b.is_zero() {
        return Ok(0.0);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok(dot.clamp(-1.0, 1.0))
}

/// A sentence-embedding model.
///
/// Implementations must be deterministic within a process and agree between
/// batch and single-text calls. Callers should go through [`embed`], which
/// enforces the zero-vector sentinel and the output contract.
pub trait EmbeddingBackend: Send + Sync {
    fn backend_id(&self) -> &str;
    fn dim(&self) -> usize;
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError>;
}

impl<E: EmbeddingBackend + ?Sized> EmbeddingBackend for &E {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
        (**self).embed_batch(texts)
    }
}

impl<E: EmbeddingBackend + ?Sized> EmbeddingBackend for std::sync::Arc<E> {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
        (**self).embed_batch(texts)
    }
}

/// Embeds `texts` in order. Whitespace-only texts map to the zero vector
/// without reaching the backend.
pub fn embed(backend: &dyn EmbeddingBackend, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
    let dim = backend.dim();
    let live: Vec<usize> = (0..texts.len()).filter(|&i| !texts[i].trim().is_empty()).collect();
    let mut out = vec![EmbeddingVector::zeros(dim); texts.len()];
    if live.is_empty() {
        return Ok(out);
    }
    let batch: Vec<&str> = live.iter().map(|&i| texts[i]).collect();
    let vectors = backend.embed_batch(&batch)?;
    if vectors.len() != batch.len() {
        return Err(BackendError::Protocol {
            endpoint: backend.backend_id().to_string(),
            message: format!("expected {} vectors, got {}", batch.len(), vectors.len()),
        });
    }
    for (slot, vector) in live.into_iter().zip(vectors) {
        if vector.dim() != dim {
            return Err(BackendError::DimensionMismatch {
                expected: dim,
                got: vector.dim(),
            });
        }
        out[slot] = vector;
    }
    Ok(out)
}
