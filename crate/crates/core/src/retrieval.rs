//! Evidence retrieval: ranking source sentences by similarity to a summary
//! sentence and widening the top hits into neighbor-window snippets.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::Document;
use crate::embedding::{cosine, EmbeddingError, EmbeddingVector};

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("document has no sentences")]
    EmptyDocument,
    #[error("snippet center {center} out of range for {sentences} sentences")]
    CenterOutOfRange { center: usize, sentences: usize },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("invalid k {0:?}: expected a positive integer or \"I\"")]
    InvalidK(String),
    #[error("neighbor offsets must include 0")]
    MissingCenterOffset,
    #[error("duplicate neighbor offset {0}")]
    DuplicateOffset(i64),
    #[error("invalid neighbor offsets {0:?}")]
    InvalidOffsets(String),
}

/// Number of retrieved candidates per summary sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopK {
    Count(usize),
    /// Every source sentence (`K = I`).
    All,
}

impl TopK {
    pub fn new(k: usize) -> Result<Self, ConfigError> {
        if k == 0 {
            return Err(ConfigError::ZeroK);
        }
        Ok(TopK::Count(k))
    }

    /// `min(K, I)` for a document with `sentences` sentences.
    pub fn effective(self, sentences: usize) -> usize {
        match self {
            TopK::Count(k) => k.min(sentences),
            TopK::All => sentences,
        }
    }
}

impl fmt::Display for TopK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopK::Count(k) => write!(f, "{k}"),
            TopK::All => f.write_str("I"),
        }
    }
}

impl FromStr for TopK {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("i") || s.eq_ignore_ascii_case("all") {
            return Ok(TopK::All);
        }
        let k: usize = s.parse().map_err(|_| ConfigError::InvalidK(s.to_string()))?;
        TopK::new(k)
    }
}

impl Serialize for TopK {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            TopK::Count(k) => serializer.serialize_u64(*k as u64),
            TopK::All => serializer.serialize_str("I"),
        }
    }
}

impl<'de> Deserialize<'de> for TopK {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(k) => TopK::new(k as usize),
            Raw::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Sorted, duplicate-free sentence offsets around a retrieved center; always contains 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct NeighborOffsets(Vec<i64>);

impl NeighborOffsets {
    pub fn new(mut offsets: Vec<i64>) -> Result<Self, ConfigError> {
        offsets.sort_unstable();
        if let Some(w) = offsets.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::DuplicateOffset(w[0]));
        }
        if offsets.binary_search(&0).is_err() {
            return Err(ConfigError::MissingCenterOffset);
        }
        Ok(NeighborOffsets(offsets))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl Default for NeighborOffsets {
    fn default() -> Self {
        NeighborOffsets(vec![-1, 0, 1])
    }
}

impl fmt::Display for NeighborOffsets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"-1,0,1"`.
impl FromStr for NeighborOffsets {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let offsets = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ConfigError::InvalidOffsets(s.to_string()))?;
        NeighborOffsets::new(offsets)
    }
}

impl<'de> Deserialize<'de> for NeighborOffsets {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        NeighborOffsets::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Scoring configuration shared by every summary in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub k: TopK,
    pub neighbor_offsets: NeighborOffsets,
    pub embed_backend_id: String,
    pub score_backend_id: String,
    /// Error on summary sentences without tokens instead of skipping them.
    #[serde(default)]
    pub strict: bool,
    /// With `K = I`, score every snippet without computing embeddings.
    #[serde(default)]
    pub skip_similarity: bool,
}

impl MetricConfig {
    pub fn new(k: TopK, neighbor_offsets: NeighborOffsets) -> Self {
        MetricConfig {
            k,
            neighbor_offsets,
            embed_backend_id: String::new(),
            score_backend_id: String::new(),
            strict: false,
            skip_similarity: false,
        }
    }

    pub fn with_backends(mut self, embed_backend_id: &str, score_backend_id: &str) -> Self {
        self.embed_backend_id = embed_backend_id.to_string();
        self.score_backend_id = score_backend_id.to_string();
        self
    }
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig::new(TopK::Count(3), NeighborOffsets::default())
    }
}

/// A retrieved source sentence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub index: usize,
    pub similarity: f64,
}

fn by_rank(a: &Ranked, b: &Ranked) -> Ordering {
    b.similarity.total_cmp(&a.similarity).then(a.index.cmp(&b.index))
}

/// The `min(k, n)` highest similarities, descending; ties go to the lower index.
pub fn top_k_by_similarity(similarities: &[f64], k: usize) -> Vec<Ranked> {
    let mut ranked: Vec<Ranked> = similarities
        .iter()
        .enumerate()
        .map(|(index, &similarity)| Ranked { index, similarity })
        .collect();
    let k = k.min(ranked.len());
    if k == 0 {
        return Vec::new();
    }
    if k < ranked.len() {
        ranked.select_nth_unstable_by(k - 1, by_rank);
        ranked.truncate(k);
    }
    ranked.sort_unstable_by(by_rank);
    ranked
}

/// Ranks document sentences by cosine similarity to `summary_vec` and keeps the top `k`.
pub fn retrieve_top_k(
    summary_vec: &EmbeddingVector,
    doc_vecs: &[EmbeddingVector],
    k: usize,
) -> Result<Vec<Ranked>, RetrievalError> {
    if doc_vecs.is_empty() {
        return Err(RetrievalError::EmptyDocument);
    }
    let sims = doc_vecs
        .iter()
        .map(|d| cosine(summary_vec, d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(top_k_by_similarity(&sims, k))
}

/// A retrieved sentence widened with its neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    pub center_index: usize,
    /// Offsets that fell inside the document.
    pub offsets: Vec<i64>,
    pub text: String,
    /// Cosine of the center sentence to the summary sentence, when computed.
    pub similarity: Option<f64>,
}

/// Joins the sentences at `center + offset` that exist, in document order.
/// Offsets falling outside the document are omitted.
pub fn build_snippet(
    document: &Document,
    center: usize,
    neighbor_offsets: &NeighborOffsets,
) -> Result<Snippet, RetrievalError> {
    let n = document.sentences.len();
    if center >= n {
        return Err(RetrievalError::CenterOutOfRange { center, sentences: n });
    }
    let mut offsets = Vec::with_capacity(neighbor_offsets.as_slice().len());
    let mut parts = Vec::with_capacity(offsets.capacity());
    for &o in neighbor_offsets.as_slice() {
        let Some(idx) = center.checked_add_signed(o as isize) else {
            continue;
        };
        if idx < n {
            offsets.push(o);
            parts.push(document.sentences[idx].text.as_str());
        }
    }
    Ok(Snippet {
        center_index: center,
        offsets,
        text: parts.join(" "),
        similarity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmenter::Segmenter;
    use proptest::prelude::*;

    fn numbered_doc(n: usize) -> Document {
        let text: Vec<String> = (0..n).map(|i| format!("Sentence {i}.")).collect();
        Document::new("d", text.join(" "), &Segmenter::default())
    }

    /// Full stable sort, independent of the selection path.
    fn full_sort_oracle(sims: &[f64], k: usize) -> Vec<(usize, f64)> {
        let mut idx: Vec<usize> = (0..sims.len()).collect();
        idx.sort_by(|&a, &b| sims[b].partial_cmp(&sims[a]).unwrap());
        idx.into_iter().take(k).map(|i| (i, sims[i])).collect()
    }

    fn pairs(r: &[Ranked]) -> Vec<(usize, f64)> {
        r.iter().map(|r| (r.index, r.similarity)).collect()
    }

    #[test]
    fn ties_go_to_lower_index() {
        let sims = [0.9, 0.2, 0.9, 0.5];
        assert_eq!(pairs(&top_k_by_similarity(&sims, 2)), vec![(0, 0.9), (2, 0.9)]);
        assert_eq!(pairs(&top_k_by_similarity(&sims, 2)), full_sort_oracle(&sims, 2));
    }

    #[test]
    fn k_beyond_length_returns_everything() {
        let sims = [0.1, 0.3, 0.2];
        assert_eq!(
            pairs(&top_k_by_similarity(&sims, 10)),
            vec![(1, 0.3), (2, 0.2), (0, 0.1)]
        );
    }

    #[test]
    fn all_zero_vectors_pick_first_indices() {
        let docs = vec![EmbeddingVector::zeros(4); 5];
        let q = EmbeddingVector::from_raw(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            pairs(&retrieve_top_k(&q, &docs, 3).unwrap()),
            vec![(0, 0.0), (1, 0.0), (2, 0.0)]
        );
        assert_eq!(retrieve_top_k(&q, &[], 3), Err(RetrievalError::EmptyDocument));
    }

    #[test]
    fn interior_window() {
        let doc = numbered_doc(20);
        let s = build_snippet(&doc, 5, &NeighborOffsets::default()).unwrap();
        assert_eq!(s.text, "Sentence 4. Sentence 5. Sentence 6.");
        assert_eq!(s.offsets, vec![-1, 0, 1]);
    }

    #[test]
    fn boundary_clamp_by_omission() {
        let doc = numbered_doc(20);
        let s = build_snippet(&doc, 0, &NeighborOffsets::default()).unwrap();
        assert_eq!(s.text, "Sentence 0. Sentence 1.");
        assert_eq!(s.offsets, vec![0, 1]);
        let s = build_snippet(&doc, 19, &NeighborOffsets::default()).unwrap();
        assert_eq!(s.text, "Sentence 18. Sentence 19.");
    }

    #[test]
    fn skip_window_excludes_adjacent_sentences() {
        let doc = numbered_doc(10);
        let offsets: NeighborOffsets = "-2,0,2".parse().unwrap();
        let s = build_snippet(&doc, 3, &offsets).unwrap();
        assert_eq!(s.text, "Sentence 1. Sentence 3. Sentence 5.");
    }

    #[test]
    fn center_out_of_range() {
        let doc = numbered_doc(3);
        assert_eq!(
            build_snippet(&doc, 3, &NeighborOffsets::default()),
            Err(RetrievalError::CenterOutOfRange {
                center: 3,
                sentences: 3
            })
        );
    }

    #[test]
    fn config_validation() {
        assert_eq!(TopK::new(0), Err(ConfigError::ZeroK));
        assert_eq!("I".parse::<TopK>().unwrap(), TopK::All);
        assert_eq!("7".parse::<TopK>().unwrap(), TopK::Count(7));
        assert!("x".parse::<TopK>().is_err());
        assert_eq!("1,-1".parse::<NeighborOffsets>(), Err(ConfigError::MissingCenterOffset));
        assert_eq!("0,1,1".parse::<NeighborOffsets>(), Err(ConfigError::DuplicateOffset(1)));
        assert_eq!("1,0,-1".parse::<NeighborOffsets>().unwrap().as_slice(), &[-1, 0, 1]);
        assert_eq!(TopK::Count(3).effective(2), 2);
        assert_eq!(TopK::All.effective(9), 9);

        let json = serde_json::to_string(&MetricConfig::new(TopK::All, NeighborOffsets::default())).unwrap();
        assert!(json.contains(r#""k":"I""#));
        let back: MetricConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k, TopK::All);
        assert!(serde_json::from_str::<MetricConfig>(&json.replace(r#""I""#, "0")).is_err());
    }

    proptest! {
        #[test]
        fn selection_matches_full_sort(sims in proptest::collection::vec(0u8..5, 1..40), k in 1usize..45) {
            let sims: Vec<f64> = sims.into_iter().map(|v| f64::from(v) / 4.0).collect();
            prop_assert_eq!(pairs(&top_k_by_similarity(&sims, k)), full_sort_oracle(&sims, k));
        }

        #[test]
        fn top_k_sets_are_nested(sims in proptest::collection::vec(0u8..4, 1..30)) {
            let sims: Vec<f64> = sims.into_iter().map(f64::from).collect();
            for k in 1..sims.len() {
                let small = top_k_by_similarity(&sims, k);
                let big = top_k_by_similarity(&sims, k + 1);
                prop_assert_eq!(&big[..k], &small[..]);
            }
            let argmax = sims.iter().enumerate().fold(0, |best, (i, &s)| if s > sims[best] { i } else { best });
            prop_assert_eq!(top_k_by_similarity(&sims, sims.len())[0].index, argmax);
        }
    }
}
