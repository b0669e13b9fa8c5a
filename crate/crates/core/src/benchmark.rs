//! Timing and call-count comparison of retrieval settings.

use std::time::Instant;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::embedding::EmbeddingBackend;
use crate::instrument::{CountingEmbedder, CountingScorer};
use crate::ldfs::{score_corpus, LdfsError};
use crate::retrieval::{MetricConfig, NeighborOffsets, TopK};
use crate::scorer::ScoreBackend;

/// Wall-clock seconds for 15 summaries in the reference GPU setup, reported
/// as context only.
pub const REFERENCE_SECONDS: &[(&str, f64)] = &[("K=3", 8.0), ("K=I", 134.0), ("K=I (no similarity)", 125.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSetting {
    pub label: String,
    pub config: MetricConfig,
}

impl BenchSetting {
    pub fn new(config: MetricConfig) -> Self {
        let mut label = format!("K={}", config.k);
        if config.skip_similarity {
            label.push_str(" (no similarity)");
        }
        BenchSetting { label, config }
    }
}

/// K=3, K=I, and K=I scoring every snippet without similarity computation.
pub fn default_settings(offsets: &NeighborOffsets) -> Vec<BenchSetting> {
    let mut no_sim = MetricConfig::new(TopK::All, offsets.clone());
    no_sim.skip_similarity = true;
    vec![
        BenchSetting::new(MetricConfig::new(TopK::Count(3), offsets.clone())),
        BenchSetting::new(MetricConfig::new(TopK::All, offsets.clone())),
        BenchSetting::new(no_sim),
    ]
}

pub fn k_sweep(ks: &[TopK], offsets: &NeighborOffsets) -> Vec<BenchSetting> {
    ks.iter()
        .map(|&k| BenchSetting::new(MetricConfig::new(k, offsets.clone())))
        .collect()
}

pub fn offsets_sweep(k: TopK, offsets: &[NeighborOffsets]) -> Vec<BenchSetting> {
    offsets
        .iter()
        .map(|o| {
            let mut s = BenchSetting::new(MetricConfig::new(k, o.clone()));
            s.label = format!("K={k} offsets={o}");
            s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub setting: String,
    pub k: String,
    pub offsets: String,
    pub skip_similarity: bool,
    pub summaries: usize,
    pub scorer_calls: usize,
    pub embed_texts: usize,
    pub embed_batches: usize,
    pub mean_summary_score: f64,
    pub wall_clock_s: f64,
}

/// Scores the whole corpus once per setting with fresh call counters.
pub fn run_bench(
    corpus: &Corpus,
    settings: &[BenchSetting],
    embedder: &dyn EmbeddingBackend,
    scorer: &dyn ScoreBackend,
) -> Result<Vec<BenchRow>, LdfsError> {
    settings
        .iter()
        .map(|setting| {
            let embedder = CountingEmbedder::new(embedder);
            let scorer = CountingScorer::new(scorer);
            let start = Instant::now();
            let reports = score_corpus(
                corpus.documents(),
                corpus.summaries(),
                &setting.config,
                &embedder,
                &scorer,
            )?;
            let wall_clock_s = start.elapsed().as_secs_f64();
            let total: f64 = reports.iter().map(|r| r.summary_score).sum();
            Ok(BenchRow {
                setting: setting.label.clone(),
                k: setting.config.k.to_string(),
                offsets: setting.config.neighbor_offsets.to_string(),
                skip_similarity: setting.config.skip_similarity,
                summaries: reports.len(),
                scorer_calls: scorer.pairs(),
                embed_texts: embedder.texts(),
                embed_batches: embedder.batches(),
                mean_summary_score: if reports.is_empty() {
                    0.0
                } else {
                    total / reports.len() as f64
                },
                wall_clock_s,
            })
        })
        .collect()
}
