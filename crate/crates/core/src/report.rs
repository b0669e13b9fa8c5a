//! The `scores.jsonl` line format shared by every metric.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{CorpusError, SummaryKey};
use crate::ldfs::{ScoreReport, SentenceResult};

/// Metric label of summary-level LDFS scores.
pub const LDFS_LABEL: &str = "ldfs";

/// One scored summary. `metric` names the metric variant; `system_id` is the
/// summarization system that produced the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreLine {
    pub doc_id: String,
    pub system_id: String,
    pub metric: String,
    pub summary_score: f64,
    #[serde(default)]
    pub sentence_results: Vec<SentenceResult>,
    #[serde(default)]
    pub config: Value,
    #[serde(default)]
    pub scorer_call_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_variant: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ScoreLine {
    pub fn key(&self) -> SummaryKey {
        SummaryKey::new(&self.doc_id, &self.system_id)
    }
}

impl From<ScoreReport> for ScoreLine {
    fn from(r: ScoreReport) -> Self {
        ScoreLine {
            doc_id: r.doc_id,
            system_id: r.system_id,
            metric: LDFS_LABEL.to_string(),
            summary_score: r.summary_score,
            sentence_results: r.sentence_results,
            config: serde_json::to_value(&r.config).expect("config serializes"),
            scorer_call_count: r.scorer_call_count,
            score_variant: Some(r.score_variant),
            warnings: r.warnings,
        }
    }
}

pub fn to_jsonl(lines: &[ScoreLine]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&serde_json::to_string(l).expect("score line serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_score_lines(raw: &str, source_name: &str) -> Result<Vec<ScoreLine>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            source_name: source_name.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    if out.is_empty() {
        return Err(CorpusError::NoRecords {
            source_name: source_name.to_string(),
        });
    }
    Ok(out)
}

pub fn load_score_lines(path: impl AsRef<Path>) -> Result<Vec<ScoreLine>, CorpusError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_score_lines(&raw, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, SummaryRecord};
    use crate::embedding::HashedEmbedder;
    use crate::ldfs::score_summary;
    use crate::retrieval::MetricConfig;
    use crate::scorer::LexicalScorer;
    use crate::segmenter::Segmenter;

    #[test]
    fn report_round_trips_through_jsonl() {
        let seg = Segmenter::default();
        let doc = Document::new("d1", "Cats purr. Dogs bark. Birds sing.", &seg);
        let sum = SummaryRecord::new("d1", "m1", "Dogs purr.", &seg);
        let report = score_summary(
            &doc,
            &sum,
            &MetricConfig::default(),
            &HashedEmbedder,
            &LexicalScorer::default(),
        )
        .unwrap();
        let line = ScoreLine::from(report.clone());
        let raw = to_jsonl(std::slice::from_ref(&line));
        let v: Value = serde_json::from_str(raw.trim()).unwrap();
        for field in [
            "doc_id",
            "system_id",
            "summary_score",
            "sentence_results",
            "config",
            "scorer_call_count",
        ] {
            assert!(v.get(field).is_some(), "missing {field}");
        }
        assert_eq!(v["config"]["k"], 3);
        let back = parse_score_lines(&raw, "scores").unwrap();
        assert_eq!(back, vec![line]);
        let config: MetricConfig = serde_json::from_value(back[0].config.clone()).unwrap();
        assert_eq!(config, report.config);
    }

    #[test]
    fn minimal_lines_parse() {
        let raw = r#"{"doc_id":"d","system_id":"s","metric":"rouge1-f1-nostem","summary_score":0.5}"#;
        let lines = parse_score_lines(raw, "x").unwrap();
        assert_eq!(lines[0].key(), SummaryKey::new("d", "s"));
        assert!(matches!(parse_score_lines("", "x"), Err(CorpusError::NoRecords { .. })));
    }
}
