//! Documents, summaries and human entailment annotations.
//!
//! All inputs are UTF-8 JSON-lines files; blank lines are skipped and unknown
//! fields are carried through untouched.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::segmenter::{Segmenter, Sentence};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: malformed record: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{source_name}: no records")]
    NoRecords { source_name: String },
    #[error("{source_name}:{line}: empty {field}")]
    EmptyField {
        source_name: String,
        line: usize,
        field: &'static str,
    },
    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),
    #[error("duplicate summary for doc_id {doc_id:?}, system_id {system_id:?}")]
    DuplicateSummary { doc_id: String, system_id: String },
    #[error("summary {system_id:?} references missing doc_id {doc_id:?}")]
    MissingDocument { doc_id: String, system_id: String },
    #[error("{source_name}:{line}: label {label} is not 0 or 1")]
    InvalidLabel {
        source_name: String,
        line: usize,
        label: i64,
    },
    #[error("{source_name}:{line}: negative sentence_index {index}")]
    NegativeSentenceIndex {
        source_name: String,
        line: usize,
        index: i64,
    },
    #[error("duplicate annotation for ({doc_id}, {system_id}, {annotator_id}, sentence {sentence_index})")]
    DuplicateAnnotation {
        doc_id: String,
        system_id: String,
        annotator_id: String,
        sentence_index: usize,
    },
    #[error("no annotations for doc_id {doc_id:?}, system_id {system_id:?}")]
    NoAnnotations { doc_id: String, system_id: String },
    #[error("annotation sentence_index {sentence_index} out of range for ({doc_id}, {system_id}) with {sentences} sentences")]
    SentenceIndexOutOfRange {
        doc_id: String,
        system_id: String,
        sentence_index: usize,
        sentences: usize,
    },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// A source article split into sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    pub sentences: Vec<Sentence>,
    pub extra: Map<String, Value>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>, segmenter: &Segmenter) -> Self {
        let text = text.into();
        Document {
            doc_id: doc_id.into(),
            sentences: segmenter.split_sentences(&text),
            text,
            extra: Map::new(),
        }
    }

    pub fn sentence_texts(&self) -> Vec<&str> {
        self.sentences.iter().map(|s| s.text.as_str()).collect()
    }
}

/// A generated summary of one document by one system.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub doc_id: String,
    pub system_id: String,
    pub summary_text: String,
    pub sentences: Vec<Sentence>,
    pub extra: Map<String, Value>,
}

impl SummaryRecord {
    pub fn new(
        doc_id: impl Into<String>,
        system_id: impl Into<String>,
        summary_text: impl Into<String>,
        segmenter: &Segmenter,
    ) -> Self {
        let summary_text = summary_text.into();
        SummaryRecord {
            doc_id: doc_id.into(),
            system_id: system_id.into(),
            sentences: segmenter.split_sentences(&summary_text),
            summary_text,
            extra: Map::new(),
        }
    }

    pub fn key(&self) -> SummaryKey {
        SummaryKey::new(&self.doc_id, &self.system_id)
    }
}

/// `(doc_id, system_id)` identifying one summary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SummaryKey {
    pub doc_id: String,
    pub system_id: String,
}

impl SummaryKey {
    pub fn new(doc_id: &str, system_id: &str) -> Self {
        SummaryKey {
            doc_id: doc_id.to_string(),
            system_id: system_id.to_string(),
        }
    }
}

impl std::fmt::Display for SummaryKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.doc_id, self.system_id)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DocumentLine {
    doc_id: String,
    text: String,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SummaryLine {
    doc_id: String,
    system_id: String,
    summary: String,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

/// Immutable, validated set of documents and the summaries that reference them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: IndexMap<String, Document>,
    summaries: Vec<SummaryRecord>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, summaries: Vec<SummaryRecord>) -> Result<Self> {
        let mut by_id = IndexMap::with_capacity(documents.len());
        for doc in documents {
            if by_id.contains_key(&doc.doc_id) {
                return Err(CorpusError::DuplicateDocId(doc.doc_id));
            }
            by_id.insert(doc.doc_id.clone(), doc);
        }
        let mut seen = HashSet::with_capacity(summaries.len());
        for s in &summaries {
            if !by_id.contains_key(&s.doc_id) {
                return Err(CorpusError::MissingDocument {
                    doc_id: s.doc_id.clone(),
                    system_id: s.system_id.clone(),
                });
            }
            if !seen.insert(s.key()) {
                return Err(CorpusError::DuplicateSummary {
                    doc_id: s.doc_id.clone(),
                    system_id: s.system_id.clone(),
                });
            }
        }
        Ok(Corpus {
            documents: by_id,
            summaries,
        })
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.get(doc_id)
    }

    pub fn summaries(&self) -> &[SummaryRecord] {
        &self.summaries
    }

    pub fn summary(&self, key: &SummaryKey) -> Option<&SummaryRecord> {
        self.summaries
            .iter()
            .find(|s| s.doc_id == key.doc_id && s.system_id == key.system_id)
    }

    pub fn documents_jsonl(&self) -> String {
        let mut out = String::new();
        for d in self.documents.values() {
            let line = DocumentLine {
                doc_id: d.doc_id.clone(),
                text: d.text.clone(),
                extra: d.extra.clone(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("serializable"));
        }
        out
    }

    pub fn summaries_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.summaries {
            let line = SummaryLine {
                doc_id: s.doc_id.clone(),
                system_id: s.system_id.clone(),
                summary: s.summary_text.clone(),
                extra: s.extra.clone(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("serializable"));
        }
        out
    }

    pub fn from_jsonl(documents: &str, summaries: &str, segmenter: &Segmenter) -> Result<Self> {
        let docs = parse_documents(documents, "documents", segmenter)?;
        let sums = parse_summaries(summaries, "summaries", segmenter)?;
        Corpus::new(docs, sums)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses non-blank JSON lines, tagging errors with 1-based line numbers.
fn parse_lines<T: for<'de> Deserialize<'de>>(raw: &str, source_name: &str) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim_start_matches('\u{feff}');
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            source_name: source_name.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, record));
    }
    if out.is_empty() {
        return Err(CorpusError::NoRecords {
            source_name: source_name.to_string(),
        });
    }
    Ok(out)
}

fn require(value: &str, source_name: &str, line: usize, field: &'static str) -> Result<()> {
    if value.trim().is_empty() {
        return Err(CorpusError::EmptyField {
            source_name: source_name.to_string(),
            line,
            field,
        });
    }
    Ok(())
}

pub fn parse_documents(raw: &str, source_name: &str, segmenter: &Segmenter) -> Result<Vec<Document>> {
    parse_lines::<DocumentLine>(raw, source_name)?
        .into_iter()
        .map(|(line, rec)| {
            require(&rec.doc_id, source_name, line, "doc_id")?;
            require(&rec.text, source_name, line, "text")?;
            let sentences = segmenter.split_sentences(&rec.text);
            if sentences.is_empty() {
                return Err(CorpusError::EmptyField {
                    source_name: source_name.to_string(),
                    line,
                    field: "text",
                });
            }
            Ok(Document {
                doc_id: rec.doc_id,
                text: rec.text,
                sentences,
                extra: rec.extra,
            })
        })
        .collect()
}

pub fn parse_summaries(raw: &str, source_name: &str, segmenter: &Segmenter) -> Result<Vec<SummaryRecord>> {
    parse_lines::<SummaryLine>(raw, source_name)?
        .into_iter()
        .map(|(line, rec)| {
            require(&rec.doc_id, source_name, line, "doc_id")?;
            require(&rec.system_id, source_name, line, "system_id")?;
            require(&rec.summary, source_name, line, "summary")?;
            let sentences = segmenter.split_sentences(&rec.summary);
            if sentences.is_empty() {
                return Err(CorpusError::EmptyField {
                    source_name: source_name.to_string(),
                    line,
                    field: "summary",
                });
            }
            Ok(SummaryRecord {
                doc_id: rec.doc_id,
                system_id: rec.system_id,
                summary_text: rec.summary,
                sentences,
                extra: rec.extra,
            })
        })
        .collect()
}

/// Reads and validates a documents file and a summaries file.
pub fn load_corpus(
    documents_path: impl AsRef<Path>,
    summaries_path: impl AsRef<Path>,
    segmenter: &Segmenter,
) -> Result<Corpus> {
    let (dp, sp) = (documents_path.as_ref(), summaries_path.as_ref());
    let docs = parse_documents(&read(dp)?, &dp.display().to_string(), segmenter)?;
    let sums = parse_summaries(&read(sp)?, &sp.display().to_string(), segmenter)?;
    Corpus::new(docs, sums)
}

/// One binary entailment judgement of one summary sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub system_id: String,
    pub annotator_id: String,
    pub sentence_index: usize,
    /// 1 = entailed, 0 = not entailed.
    pub label: u8,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl AnnotationRecord {
    pub fn new(doc_id: &str, system_id: &str, annotator_id: &str, sentence_index: usize, label: u8) -> Self {
        AnnotationRecord {
            doc_id: doc_id.to_string(),
            system_id: system_id.to_string(),
            annotator_id: annotator_id.to_string(),
            sentence_index,
            label,
            extra: Map::new(),
        }
    }

    pub fn summary_key(&self) -> SummaryKey {
        SummaryKey::new(&self.doc_id, &self.system_id)
    }
}

#[derive(Debug, Deserialize)]
struct AnnotationLine {
    doc_id: String,
    system_id: String,
    annotator_id: String,
    sentence_index: i64,
    label: i64,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

/// Validated fine-grained annotations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationSet {
    records: Vec<AnnotationRecord>,
}

impl AnnotationSet {
    pub fn new(records: Vec<AnnotationRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            let key = (&r.doc_id, &r.system_id, &r.annotator_id, r.sentence_index);
            if !seen.insert(key) {
                return Err(CorpusError::DuplicateAnnotation {
                    doc_id: r.doc_id.clone(),
                    system_id: r.system_id.clone(),
                    annotator_id: r.annotator_id.clone(),
                    sentence_index: r.sentence_index,
                });
            }
        }
        Ok(AnnotationSet { records })
    }

    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct summary keys in first-seen order.
    pub fn summary_keys(&self) -> Vec<SummaryKey> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .map(AnnotationRecord::summary_key)
            .filter(|k| seen.insert(k.clone()))
            .collect()
    }

    /// Distinct annotator ids, sorted.
    pub fn annotators(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.records.iter().map(|r| r.annotator_id.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Mean label of each annotator for one summary.
    pub fn per_annotator_means(&self, doc_id: &str, system_id: &str) -> BTreeMap<&str, f64> {
        let mut tallies: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
        for r in self
            .records
            .iter()
            .filter(|r| r.doc_id == doc_id && r.system_id == system_id)
        {
            let t = tallies.entry(r.annotator_id.as_str()).or_default();
            t.0 += u32::from(r.label);
            t.1 += 1;
        }
        tallies
            .into_iter()
            .map(|(a, (pos, n))| (a, f64::from(pos) / f64::from(n)))
            .collect()
    }

    /// Summary-level human score: each annotator's mean label, averaged over
    /// annotators with equal weight.
    pub fn summary_level_human_score(&self, doc_id: &str, system_id: &str) -> Result<f64> {
        let mut means: Vec<f64> = self.per_annotator_means(doc_id, system_id).into_values().collect();
        if means.is_empty() {
            return Err(CorpusError::NoAnnotations {
                doc_id: doc_id.to_string(),
                system_id: system_id.to_string(),
            });
        }
        // Sum in value order so the result does not depend on annotator names.
        means.sort_by(f64::total_cmp);
        Ok(means.iter().sum::<f64>() / means.len() as f64)
    }

    /// Checks every annotated sentence index against the segmented summary.
    /// In strict mode an out-of-range index is an error; otherwise it is
    /// returned as a warning. Keys without a matching summary are ignored here.
    pub fn validate_against(&self, corpus: &Corpus, strict: bool) -> Result<Vec<String>> {
        let sentence_counts: HashMap<SummaryKey, usize> = corpus
            .summaries()
            .iter()
            .map(|s| (s.key(), s.sentences.len()))
            .collect();
        let mut warnings = Vec::new();
        for r in &self.records {
            let Some(&count) = sentence_counts.get(&r.summary_key()) else {
                continue;
            };
            if r.sentence_index >= count {
                let err = CorpusError::SentenceIndexOutOfRange {
                    doc_id: r.doc_id.clone(),
                    system_id: r.system_id.clone(),
                    sentence_index: r.sentence_index,
                    sentences: count,
                };
                if strict {
                    return Err(err);
                }
                warnings.push(err.to_string());
            }
        }
        Ok(warnings)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "{}", serde_json::to_string(r).expect("serializable"));
        }
        out
    }
}

pub fn parse_annotations(raw: &str, source_name: &str) -> Result<AnnotationSet> {
    let records = parse_lines::<AnnotationLine>(raw, source_name)?
        .into_iter()
        .map(|(line, rec)| {
            require(&rec.doc_id, source_name, line, "doc_id")?;
            require(&rec.system_id, source_name, line, "system_id")?;
            require(&rec.annotator_id, source_name, line, "annotator_id")?;
            if rec.sentence_index < 0 {
                return Err(CorpusError::NegativeSentenceIndex {
                    source_name: source_name.to_string(),
                    line,
                    index: rec.sentence_index,
                });
            }
            let label = match rec.label {
                0 | 1 => rec.label as u8,
                other => {
                    return Err(CorpusError::InvalidLabel {
                        source_name: source_name.to_string(),
                        line,
                        label: other,
                    })
                }
            };
            Ok(AnnotationRecord {
                doc_id: rec.doc_id,
                system_id: rec.system_id,
                annotator_id: rec.annotator_id,
                sentence_index: rec.sentence_index as usize,
                label,
                extra: rec.extra,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AnnotationSet::new(records)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let path = path.as_ref();
    parse_annotations(&read(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg() -> Segmenter {
        Segmenter::default()
    }

    #[test]
    fn document_line_is_segmented() {
        let docs = parse_documents(r#"{"doc_id":"d1","text":"A. B."}"#, "docs", &seg()).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].sentences.len(), 2);
    }

    #[test]
    fn empty_file_has_no_records() {
        let err = parse_documents("\n\n", "docs", &seg()).unwrap_err();
        assert!(matches!(err, CorpusError::NoRecords { .. }));
        assert!(err.to_string().contains("no records"));
    }

    #[test]
    fn duplicate_doc_id_is_named() {
        let raw = "{\"doc_id\":\"d1\",\"text\":\"A.\"}\n{\"doc_id\":\"d1\",\"text\":\"B.\"}\n";
        let err = Corpus::from_jsonl(raw, r#"{"doc_id":"d1","system_id":"m","summary":"A."}"#, &seg()).unwrap_err();
        assert!(matches!(&err, CorpusError::DuplicateDocId(id) if id == "d1"));
        assert!(err.to_string().contains("d1"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let raw = "{\"doc_id\":\"d1\",\"text\":\"A.\"}\n\n{not json\n";
        match parse_documents(raw, "docs", &seg()).unwrap_err() {
            CorpusError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_document_and_empty_text() {
        let docs = r#"{"doc_id":"d1","text":"A."}"#;
        let err = Corpus::from_jsonl(docs, r#"{"doc_id":"d2","system_id":"m","summary":"A."}"#, &seg()).unwrap_err();
        assert!(matches!(err, CorpusError::MissingDocument { .. }));
        let err = parse_documents(r#"{"doc_id":"d1","text":"   "}"#, "docs", &seg()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyField { field: "text", .. }));
        let err = parse_summaries(r#"{"doc_id":"d1","system_id":"m","summary":"..."}"#, "s", &seg()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyField { field: "summary", .. }));
    }

    #[test]
    fn duplicate_summary_key() {
        let docs = r#"{"doc_id":"d1","text":"A."}"#;
        let sums = "{\"doc_id\":\"d1\",\"system_id\":\"m\",\"summary\":\"A.\"}\n{\"doc_id\":\"d1\",\"system_id\":\"m\",\"summary\":\"B.\"}";
        assert!(matches!(
            Corpus::from_jsonl(docs, sums, &seg()),
            Err(CorpusError::DuplicateSummary { .. })
        ));
    }

    #[test]
    fn extra_fields_survive_round_trip() {
        let docs = r#"{"doc_id":"d1","text":"Alpha one. Beta two.","source":"journal","year":2020}"#;
        let sums = r#"{"doc_id":"d1","system_id":"m1","summary":"Alpha one.","model":{"name":"x"}}"#;
        let corpus = Corpus::from_jsonl(docs, sums, &seg()).unwrap();
        assert_eq!(corpus.document("d1").unwrap().extra["source"], "journal");
        let again = Corpus::from_jsonl(&corpus.documents_jsonl(), &corpus.summaries_jsonl(), &seg()).unwrap();
        assert_eq!(again, corpus);
    }

    #[test]
    fn annotation_parsing_and_validation() {
        let one = r#"{"doc_id":"d1","system_id":"m1","annotator_id":"a1","sentence_index":0,"label":1}"#;
        let set = parse_annotations(one, "ann").unwrap();
        assert_eq!(set.records().len(), 1);
        assert_eq!(set.records()[0].label, 1);

        let bad = r#"{"doc_id":"d1","system_id":"m1","annotator_id":"a1","sentence_index":0,"label":2}"#;
        assert!(matches!(
            parse_annotations(bad, "ann"),
            Err(CorpusError::InvalidLabel { label: 2, .. })
        ));

        let neg = r#"{"doc_id":"d1","system_id":"m1","annotator_id":"a1","sentence_index":-1,"label":0}"#;
        assert!(matches!(
            parse_annotations(neg, "ann"),
            Err(CorpusError::NegativeSentenceIndex { index: -1, .. })
        ));

        let dup = format!(
            "{one}\n{}",
            r#"{"doc_id":"d1","system_id":"m1","annotator_id":"a1","sentence_index":0,"label":0}"#
        );
        assert!(matches!(
            parse_annotations(&dup, "ann"),
            Err(CorpusError::DuplicateAnnotation { .. })
        ));
    }

    fn labels(records: &mut Vec<AnnotationRecord>, annotator: &str, ls: &[u8]) {
        for (i, &l) in ls.iter().enumerate() {
            records.push(AnnotationRecord::new("d1", "m1", annotator, i, l));
        }
    }

    #[test]
    fn nested_mean_human_score() {
        let mut r = Vec::new();
        labels(&mut r, "a1", &[1, 1, 0]);
        labels(&mut r, "a2", &[1, 0, 0]);
        let set = AnnotationSet::new(r).unwrap();
        assert!((set.summary_level_human_score("d1", "m1").unwrap() - 0.5).abs() < 1e-12);

        let mut r = Vec::new();
        labels(&mut r, "a1", &[1, 1]);
        labels(&mut r, "a2", &[1]);
        assert_eq!(
            AnnotationSet::new(r)
                .unwrap()
                .summary_level_human_score("d1", "m1")
                .unwrap(),
            1.0
        );

        let mut r = Vec::new();
        labels(&mut r, "a1", &[0]);
        assert_eq!(
            AnnotationSet::new(r)
                .unwrap()
                .summary_level_human_score("d1", "m1")
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn annotators_weighted_equally() {
        // a1: 4 labels mean 1.0; a2: 1 label mean 0.0 -> 0.5, not the pooled 0.8.
        let mut r = Vec::new();
        labels(&mut r, "a1", &[1, 1, 1, 1]);
        labels(&mut r, "a2", &[0]);
        let set = AnnotationSet::new(r).unwrap();
        assert_eq!(set.summary_level_human_score("d1", "m1").unwrap(), 0.5);
        assert!(matches!(
            set.summary_level_human_score("d1", "other"),
            Err(CorpusError::NoAnnotations { .. })
        ));
    }

    #[test]
    fn strict_and_lenient_index_validation() {
        let corpus = Corpus::from_jsonl(
            r#"{"doc_id":"d1","text":"A. B."}"#,
            r#"{"doc_id":"d1","system_id":"m1","summary":"Only one."}"#,
            &seg(),
        )
        .unwrap();
        let mut r = Vec::new();
        labels(&mut r, "a1", &[1, 0]);
        let set = AnnotationSet::new(r).unwrap();
        assert!(matches!(
            set.validate_against(&corpus, true),
            Err(CorpusError::SentenceIndexOutOfRange {
                sentence_index: 1,
                sentences: 1,
                ..
            })
        ));
        assert_eq!(set.validate_against(&corpus, false).unwrap().len(), 1);
    }

    proptest! {
        #[test]
        fn human_score_order_and_name_invariant(
            rows in proptest::collection::vec(proptest::collection::vec(0u8..=1, 1..6), 1..5),
            shift in 0usize..20,
        ) {
            let mut records = Vec::new();
            for (a, ls) in rows.iter().enumerate() {
                for (i, &l) in ls.iter().enumerate() {
                    records.push(AnnotationRecord::new("d", "s", &format!("a{a}"), i, l));
                }
            }
            let base = AnnotationSet::new(records.clone()).unwrap().summary_level_human_score("d", "s").unwrap();

            let n = records.len();
            records.rotate_left(shift % n);
            records.reverse();
            for r in &mut records {
                r.annotator_id = format!("z{}", 97 - r.annotator_id[1..].parse::<i32>().unwrap());
            }
            let moved = AnnotationSet::new(records).unwrap().summary_level_human_score("d", "s").unwrap();
            prop_assert_eq!(base.to_bits(), moved.to_bits());
        }

        #[test]
        fn annotation_round_trip(labels in proptest::collection::vec(0u8..=1, 1..10)) {
            let records: Vec<_> = labels.iter().enumerate()
                .map(|(i, &l)| AnnotationRecord::new("d", "s", if i % 2 == 0 { "a" } else { "b" }, i, l))
                .collect();
            let set = AnnotationSet::new(records).unwrap();
            prop_assert_eq!(parse_annotations(&set.to_jsonl(), "x").unwrap(), set);
        }
    }
}
