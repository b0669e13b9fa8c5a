//! Backend wrappers for counting calls and simulating latency.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use crate::embedding::{EmbeddingBackend, EmbeddingVector};
use crate::error::BackendError;
use crate::scorer::{ScoreBackend, ScorePair};

/// Counts batches and texts passed to an embedding backend.
#[derive(Debug, Default)]
pub struct CountingEmbedder<E> {
    inner: E,
    batches: AtomicUsize,
    texts: AtomicUsize,
}

impl<E> CountingEmbedder<E> {
    pub fn new(inner: E) -> Self {
        CountingEmbedder {
            inner,
            batches: AtomicUsize::new(0),
            texts: AtomicUsize::new(0),
        }
    }

    pub fn batches(&self) -> usize {
        self.batches.load(Ordering::Relaxed)
    }

    pub fn texts(&self) -> usize {
        self.texts.load(Ordering::Relaxed)
    }
}

impl<E: EmbeddingBackend> EmbeddingBackend for CountingEmbedder<E> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
        self.batches.fetch_add(1, Ordering::Relaxed);
        self.texts.fetch_add(texts.len(), Ordering::Relaxed);
        self.inner.embed_batch(texts)
    }
}

/// Counts batches and scored pairs.
#[derive(Debug, Default)]
pub struct CountingScorer<S> {
    inner: S,
    batches: AtomicUsize,
    pairs: AtomicUsize,
}

impl<S> CountingScorer<S> {
    pub fn new(inner: S) -> Self {
        CountingScorer {
            inner,
            batches: AtomicUsize::new(0),
            pairs: AtomicUsize::new(0),
        }
    }

    pub fn batches(&self) -> usize {
        self.batches.load(Ordering::Relaxed)
    }

    /// Number of individual `(target, context)` scorings.
    pub fn pairs(&self) -> usize {
        self.pairs.load(Ordering::Relaxed)
    }
}

impl<S: ScoreBackend> ScoreBackend for CountingScorer<S> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn token_limit(&self) -> Option<usize> {
        self.inner.token_limit()
    }

    fn variant(&self) -> &str {
        self.inner.variant()
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        self.batches.fetch_add(1, Ordering::Relaxed);
        self.pairs.fetch_add(pairs.len(), Ordering::Relaxed);
        self.inner.score_batch(pairs)
    }
}

/// Sleeps for a fixed duration per scored pair before delegating.
#[derive(Debug)]
pub struct LatencyScorer<S> {
    inner: S,
    per_pair: Duration,
}

impl<S> LatencyScorer<S> {
    pub fn new(inner: S, per_pair: Duration) -> Self {
        LatencyScorer { inner, per_pair }
    }
}

impl<S: ScoreBackend> ScoreBackend for LatencyScorer<S> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn token_limit(&self) -> Option<usize> {
        self.inner.token_limit()
    }

    fn variant(&self) -> &str {
        self.inner.variant()
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        std::thread::sleep(self.per_pair * pairs.len() as u32);
        self.inner.score_batch(pairs)
    }
}

/// Returns 0 for every pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoopScorer;

impl NoopScorer {
    pub const ID: &'static str = "noop";
}

impl ScoreBackend for NoopScorer {
    fn backend_id(&self) -> &str {
        Self::ID
    }

    fn token_limit(&self) -> Option<usize> {
        None
    }

    fn variant(&self) -> &str {
        "constant-zero"
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        Ok(vec![0.0; pairs.len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::HashedEmbedder;
    use crate::scorer::LexicalScorer;
    use std::time::Instant;

    #[test]
    fn counters_track_calls() {
        let e = CountingEmbedder::new(HashedEmbedder);
        e.embed_batch(&["a", "b"]).unwrap();
        e.embed_batch(&["c"]).unwrap();
        assert_eq!((e.batches(), e.texts()), (2, 3));

        let s = CountingScorer::new(LexicalScorer::default());
        let p = ScorePair {
            target: "a",
            context: "a",
        };
        s.score_batch(&[p, p, p]).unwrap();
        assert_eq!((s.batches(), s.pairs()), (1, 3));
    }

    #[test]
    fn latency_is_per_pair() {
        let s = LatencyScorer::new(NoopScorer, Duration::from_millis(5));
        let p = ScorePair {
            target: "a",
            context: "b",
        };
        let start = Instant::now();
        assert_eq!(s.score_batch(&[p, p, p, p]).unwrap(), vec![0.0; 4]);
        assert!(start.elapsed() >= Duration::from_millis(20));
    }
}
