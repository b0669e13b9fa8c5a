//! Conditional text scorers: `metric(target | context)`, higher meaning the
//! target is better supported by the context.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::corpus::Document;
use crate::error::BackendError;
use crate::segmenter::{tokenize, truncate_to_tokens};

/// Smoothing mass added to every token count in [`lexical_score`].
pub const LEXICAL_SMOOTHING: f64 = 0.1;

/// Default context budget of the truncating baseline, in word tokens.
pub const DEFAULT_TOKEN_LIMIT: usize = 1024;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("target text has no tokens")]
    EmptyTarget,
    #[error("backend {0} has no token limit; the truncating baseline needs one")]
    NoTokenLimit(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScorePair<'a> {
    pub target: &'a str,
    pub context: &'a str,
}

/// A pairwise scorer. Implementations must be deterministic and return one
/// finite value per pair, in order.
pub trait ScoreBackend: Send + Sync {
    fn backend_id(&self) -> &str;

    /// Context budget in tokens, `None` when unlimited.
    fn token_limit(&self) -> Option<usize>;

    /// Declared aggregation of per-token log-likelihoods, e.g. `"mean"`.
    fn variant(&self) -> &str {
        "unspecified"
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError>;
}

impl<S: ScoreBackend + ?Sized> ScoreBackend for &S {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn token_limit(&self) -> Option<usize> {
        (**self).token_limit()
    }
    fn variant(&self) -> &str {
        (**self).variant()
    }
    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        (**self).score_batch(pairs)
    }
}

impl<S: ScoreBackend + ?Sized> ScoreBackend for std::sync::Arc<S> {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn token_limit(&self) -> Option<usize> {
        (**self).token_limit()
    }
    fn variant(&self) -> &str {
        (**self).variant()
    }
    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        (**self).score_batch(pairs)
    }
}

/// Scores a batch, checking targets beforehand and the response afterwards.
pub fn score_pairs(backend: &dyn ScoreBackend, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, ScoreError> {
    if pairs.iter().any(|p| tokenize(p.target).is_empty()) {
        return Err(ScoreError::EmptyTarget);
    }
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let scores = backend.score_batch(pairs)?;
    if scores.len() != pairs.len() {
        return Err(BackendError::Protocol {
            endpoint: backend.backend_id().to_string(),
            message: format!("expected {} scores, got {}", pairs.len(), scores.len()),
        }
        .into());
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(BackendError::NonFinite {
            backend: backend.backend_id().to_string(),
        }
        .into());
    }
    Ok(scores)
}

pub fn score_pair(backend: &dyn ScoreBackend, target: &str, context: &str) -> Result<f64, ScoreError> {
    Ok(score_pairs(backend, &[ScorePair { target, context }])?[0])
}

/// Mean smoothed-unigram log-probability of the target tokens under the context.
///
/// With `N` context tokens and `V` distinct token types across both texts,
/// each target token `w` gets `P(w) = (c(w) + 0.1) / (N + 0.1 V)`.
pub fn lexical_score(target: &str, context: &str) -> Result<f64, ScoreError> {
    let target = tokenize(target);
    if target.is_empty() {
        return Err(ScoreError::EmptyTarget);
    }
    let context = tokenize(context);
    let mut counts: HashMap<&str, usize> = HashMap::with_capacity(context.len());
    for t in &context {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let vocab: HashSet<&str> = target
        .iter()
        .map(String::as_str)
        .chain(counts.keys().copied())
        .collect();
    let denom = context.len() as f64 + LEXICAL_SMOOTHING * vocab.len() as f64;
    let total: f64 = target
        .iter()
        .map(|w| {
            let c = counts.get(w.as_str()).copied().unwrap_or(0) as f64;
            ((c + LEXICAL_SMOOTHING) / denom).ln()
        })
        .sum();
    Ok(total / target.len() as f64)
}

/// Offline scorer backed by [`lexical_score`].
#[derive(Debug, Clone)]
pub struct LexicalScorer {
    token_limit: Option<usize>,
}

impl LexicalScorer {
    pub const ID: &'static str = "lexical-unigram";

    pub fn new(token_limit: Option<usize>) -> Self {
        LexicalScorer { token_limit }
    }
}

impl Default for LexicalScorer {
    fn default() -> Self {
        LexicalScorer::new(Some(DEFAULT_TOKEN_LIMIT))
    }
}

impl ScoreBackend for LexicalScorer {
    fn backend_id(&self) -> &str {
        Self::ID
    }

    fn token_limit(&self) -> Option<usize> {
        self.token_limit
    }

    fn variant(&self) -> &str {
        "mean"
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        pairs
            .iter()
            .map(|p| lexical_score(p.target, p.context).map_err(|e| BackendError::InvalidInput(e.to_string())))
            .collect()
    }
}

/// Scores the whole summary against the document cut to the backend's token
/// limit, in a single call.
pub fn truncating_baseline_score(
    backend: &dyn ScoreBackend,
    summary_text: &str,
    document: &Document,
) -> Result<f64, ScoreError> {
    let limit = backend
        .token_limit()
        .ok_or_else(|| ScoreError::NoTokenLimit(backend.backend_id().to_string()))?;
    score_pair(backend, summary_text, truncate_to_tokens(&document.text, limit))
}
