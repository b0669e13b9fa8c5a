//! Summary-level factual-consistency scoring for long documents.
//!
//! For each summary sentence the `K` most similar source sentences are
//! retrieved by embedding cosine, each is widened into a snippet with its
//! neighbors, every snippet is scored as context for the summary sentence,
//! and the best snippet score is kept. The summary score is the mean of those
//! per-sentence maxima.

use std::collections::HashMap;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, SummaryRecord};
use crate::embedding::{embed, EmbeddingBackend, EmbeddingVector};
use crate::error::BackendError;
use crate::retrieval::{build_snippet, retrieve_top_k, MetricConfig, Ranked, RetrievalError, Snippet, TopK};
use crate::scorer::{score_pairs, ScoreBackend, ScoreError, ScorePair};
use crate::segmenter::tokenize;

#[derive(Debug, Error)]
pub enum LdfsError {
    #[error("document {doc_id:?} has no sentences")]
    EmptyDocument { doc_id: String },
    #[error("summary {doc_id}/{system_id} has no scorable sentences")]
    EmptySummary { doc_id: String, system_id: String },
    #[error("summary {doc_id}/{system_id}: sentence {index} has no tokens")]
    EmptySentence {
        doc_id: String,
        system_id: String,
        index: usize,
    },
    #[error("summary {system_id:?} references unknown doc_id {doc_id:?}")]
    UnresolvedDocument { doc_id: String, system_id: String },
    #[error("skipping similarity is only valid with K = I")]
    SkipSimilarityNeedsAll,
    #[error("embedding failed for document {doc_id:?}: {source}")]
    Embedding {
        doc_id: String,
        #[source]
        source: BackendError,
    },
    #[error(
        "scoring failed for {doc_id}/{system_id}, summary sentence {sentence}, snippet centers {centers:?}: {source}"
    )]
    Scoring {
        doc_id: String,
        system_id: String,
        sentence: usize,
        centers: Vec<usize>,
        #[source]
        source: Box<ScoreError>,
    },
    #[error("retrieval failed for {doc_id}/{system_id}: {source}")]
    Retrieval {
        doc_id: String,
        system_id: String,
        #[source]
        source: RetrievalError,
    },
}

impl LdfsError {
    pub fn is_backend(&self) -> bool {
        matches!(self, LdfsError::Embedding { .. } | LdfsError::Scoring { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetScore {
    pub center_index: usize,
    pub similarity: Option<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceResult {
    pub summary_sentence_index: usize,
    pub snippets: Vec<SnippetScore>,
    pub best_score: f64,
}

/// Per-summary result with the evidence behind each sentence score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub doc_id: String,
    pub system_id: String,
    pub summary_score: f64,
    pub sentence_results: Vec<SentenceResult>,
    pub config: MetricConfig,
    pub scorer_call_count: usize,
    /// Aggregation declared by the scoring backend.
    pub score_variant: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// A document with its sentence embeddings, reusable across summaries.
#[derive(Debug, Clone)]
pub struct DocumentIndex<'a> {
    pub document: &'a Document,
    vectors: Option<Vec<EmbeddingVector>>,
}

impl<'a> DocumentIndex<'a> {
    /// Embeds every document sentence once. With `skip_similarity` and `K = I`
    /// no embeddings are computed.
    pub fn build(
        document: &'a Document,
        config: &MetricConfig,
        embedder: &dyn EmbeddingBackend,
    ) -> Result<Self, LdfsError> {
        if document.sentences.is_empty() {
            return Err(LdfsError::EmptyDocument {
                doc_id: document.doc_id.clone(),
            });
        }
        if skips_similarity(config)? {
            return Ok(DocumentIndex {
                document,
                vectors: None,
            });
        }
        let vectors = embed(embedder, &document.sentence_texts()).map_err(|source| LdfsError::Embedding {
            doc_id: document.doc_id.clone(),
            source,
        })?;
        Ok(DocumentIndex {
            document,
            vectors: Some(vectors),
        })
    }

    pub fn vectors(&self) -> Option<&[EmbeddingVector]> {
        self.vectors.as_deref()
    }
}

fn skips_similarity(config: &MetricConfig) -> Result<bool, LdfsError> {
    match (config.skip_similarity, config.k) {
        (false, _) => Ok(false),
        (true, TopK::All) => Ok(true),
        (true, TopK::Count(_)) => Err(LdfsError::SkipSimilarityNeedsAll),
    }
}

/// Scores one summary against its source document.
pub fn score_summary(
    document: &Document,
    summary: &SummaryRecord,
    config: &MetricConfig,
    embedder: &dyn EmbeddingBackend,
    scorer: &dyn ScoreBackend,
) -> Result<ScoreReport, LdfsError> {
    let index = DocumentIndex::build(document, config, embedder)?;
    score_summary_indexed(&index, summary, config, embedder, scorer)
}

/// [`score_summary`] against a prebuilt [`DocumentIndex`].
pub fn score_summary_indexed(
    index: &DocumentIndex<'_>,
    summary: &SummaryRecord,
    config: &MetricConfig,
    embedder: &dyn EmbeddingBackend,
    scorer: &dyn ScoreBackend,
) -> Result<ScoreReport, LdfsError> {
    let document = index.document;
    let n_doc = document.sentences.len();
    let mut warnings = Vec::new();
    let mut live = Vec::with_capacity(summary.sentences.len());
    for s in &summary.sentences {
        if tokenize(&s.text).is_empty() {
            if config.strict {
                return Err(LdfsError::EmptySentence {
                    doc_id: summary.doc_id.clone(),
                    system_id: summary.system_id.clone(),
                    index: s.index,
                });
            }
            let msg = format!("summary sentence {} has no tokens and was skipped", s.index);
            warn!("{}/{}: {msg}", summary.doc_id, summary.system_id);
            warnings.push(msg);
        } else {
            live.push(s);
        }
    }
    if live.is_empty() {
        return Err(LdfsError::EmptySummary {
            doc_id: summary.doc_id.clone(),
            system_id: summary.system_id.clone(),
        });
    }

    let k = config.k.effective(n_doc);
    let candidates: Vec<Vec<Ranked>> = match index.vectors() {
        None => {
            let all: Vec<Ranked> = (0..n_doc)
                .map(|index| Ranked {
                    index,
                    similarity: f64::NAN,
                })
                .collect();
            vec![all; live.len()]
        }
        Some(doc_vecs) => {
            let texts: Vec<&str> = live.iter().map(|s| s.text.as_str()).collect();
            let summary_vecs = embed(embedder, &texts).map_err(|source| LdfsError::Embedding {
                doc_id: summary.doc_id.clone(),
                source,
            })?;
            summary_vecs
                .iter()
                .map(|v| retrieve_top_k(v, doc_vecs, k))
                .collect::<Result<_, _>>()
                .map_err(|source| LdfsError::Retrieval {
                    doc_id: summary.doc_id.clone(),
                    system_id: summary.system_id.clone(),
                    source,
                })?
        }
    };

    let sentence_results: Vec<SentenceResult> = live
        .par_iter()
        .zip(candidates.par_iter())
        .map(|(sentence, ranked)| {
            let snippets: Vec<Snippet> = ranked
                .iter()
                .map(|r| {
                    build_snippet(document, r.index, &config.neighbor_offsets).map(|mut s| {
                        s.similarity = (!r.similarity.is_nan()).then_some(r.similarity);
                        s
                    })
                })
                .collect::<Result<_, _>>()
                .map_err(|source| LdfsError::Retrieval {
                    doc_id: summary.doc_id.clone(),
                    system_id: summary.system_id.clone(),
                    source,
                })?;
            let pairs: Vec<ScorePair<'_>> = snippets
                .iter()
                .map(|s| ScorePair {
                    target: &sentence.text,
                    context: &s.text,
                })
                .collect();
            let scores = score_pairs(scorer, &pairs).map_err(|source| LdfsError::Scoring {
                doc_id: summary.doc_id.clone(),
                system_id: summary.system_id.clone(),
                sentence: sentence.index,
                centers: snippets.iter().map(|s| s.center_index).collect(),
                source: Box::new(source),
            })?;
            let best_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(SentenceResult {
                summary_sentence_index: sentence.index,
                snippets: snippets
                    .iter()
                    .zip(scores)
                    .map(|(s, score)| SnippetScore {
                        center_index: s.center_index,
                        similarity: s.similarity,
                        score,
                    })
                    .collect(),
                best_score,
            })
        })
        .collect::<Result<_, LdfsError>>()?;

    let total: f64 = sentence_results.iter().map(|r| r.best_score).sum();
    let summary_score = total / sentence_results.len() as f64;
    let scorer_call_count = sentence_results.iter().map(|r| r.snippets.len()).sum();
    let mut config = config.clone();
    config.embed_backend_id = embedder.backend_id().to_string();
    config.score_backend_id = scorer.backend_id().to_string();
    Ok(ScoreReport {
        doc_id: summary.doc_id.clone(),
        system_id: summary.system_id.clone(),
        summary_score,
        sentence_results,
        config,
        scorer_call_count,
        score_variant: scorer.variant().to_string(),
        warnings,
    })
}

/// Scores every summary, embedding each referenced document once.
/// Reports come back in summary order.
pub fn score_corpus<'a>(
    documents: impl IntoIterator<Item = &'a Document>,
    summaries: &[SummaryRecord],
    config: &MetricConfig,
    embedder: &dyn EmbeddingBackend,
    scorer: &dyn ScoreBackend,
) -> Result<Vec<ScoreReport>, LdfsError> {
    let by_id: HashMap<&str, &Document> = documents.into_iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let mut order: Vec<&str> = Vec::new();
    for s in summaries {
        if !by_id.contains_key(s.doc_id.as_str()) {
            return Err(LdfsError::UnresolvedDocument {
                doc_id: s.doc_id.clone(),
                system_id: s.system_id.clone(),
            });
        }
        if !order.contains(&s.doc_id.as_str()) {
            order.push(&s.doc_id);
        }
    }
    let indexes: HashMap<&str, DocumentIndex<'_>> = order
        .par_iter()
        .map(|id| DocumentIndex::build(by_id[id], config, embedder).map(|ix| (*id, ix)))
        .collect::<Result<_, _>>()?;
    summaries
        .par_iter()
        .map(|s| score_summary_indexed(&indexes[s.doc_id.as_str()], s, config, embedder, scorer))
        .collect()
}
