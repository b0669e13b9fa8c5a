//! Comparator metrics: ROUGE-N, ROUGE-L and a sentence-level greedy
//! embedding match.
//!
//! ROUGE here works on [`tokenize`] output with no stemming and no stopword
//! removal, and ROUGE-L is a single LCS over the whole texts. Report labels
//! carry the variant (see [`Baseline::label`]).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{cosine, embed, EmbeddingBackend};
use crate::error::BackendError;
use crate::segmenter::{split_sentences, tokenize};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("{0} text has no sentences")]
    EmptyText(&'static str),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("unknown baseline {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PrfScore { precision, recall, f1 }
    }

    fn from_counts(overlap: usize, candidate: usize, reference: usize) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        PrfScore::new(ratio(overlap, candidate), ratio(overlap, reference))
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> (HashMap<&[String], usize>, usize) {
    let mut counts = HashMap::new();
    if tokens.len() < n {
        return (counts, 0);
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    (counts, tokens.len() + 1 - n)
}

/// Clipped n-gram overlap.
///
/// # Panics
/// If `n` is zero.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> PrfScore {
    assert!(n >= 1, "rouge_n needs n >= 1");
    let (cand_tokens, ref_tokens) = (tokenize(candidate), tokenize(reference));
    let (cand, cand_total) = ngram_counts(&cand_tokens, n);
    let (refs, ref_total) = ngram_counts(&ref_tokens, n);
    let overlap = cand
        .iter()
        .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
        .sum();
    PrfScore::from_counts(overlap, cand_total, ref_total)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Token-level longest-common-subsequence precision/recall/F1.
pub fn rouge_l(candidate: &str, reference: &str) -> PrfScore {
    let (c, r) = (tokenize(candidate), tokenize(reference));
    PrfScore::from_counts(lcs_len(&c, &r), c.len(), r.len())
}

/// Harmonic mean of greedy sentence matching in both directions: each
/// candidate sentence takes its best cosine against the reference sentences
/// (precision) and vice versa (recall).
pub fn greedy_embedding_fscore(
    candidate: &str,
    reference: &str,
    embedder: &dyn EmbeddingBackend,
) -> Result<f64, BaselineError> {
    let cand: Vec<String> = split_sentences(candidate).into_iter().map(|s| s.text).collect();
    let refs: Vec<String> = split_sentences(reference).into_iter().map(|s| s.text).collect();
    if cand.is_empty() {
        return Err(BaselineError::EmptyText("candidate"));
    }
    if refs.is_empty() {
        return Err(BaselineError::EmptyText("reference"));
    }
    let texts: Vec<&str> = cand.iter().chain(&refs).map(String::as_str).collect();
    let vecs = embed(embedder, &texts)?;
    let (cv, rv) = vecs.split_at(cand.len());
    let sim: Vec<Vec<f64>> = cv
        .iter()
        .map(|c| {
            rv.iter()
                .map(|r| cosine(c, r).expect("backend dims validated by embed"))
                .collect()
        })
        .collect();
    let precision = sim
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / cand.len() as f64;
    let recall = (0..refs.len())
        .map(|j| sim.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / refs.len() as f64;
    if precision + recall <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

/// The comparator metrics selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Rouge1,
    Rouge2,
    RougeL,
    EmbedGreedy,
}

impl Baseline {
    /// Variant label written into reports.
    pub fn label(self) -> &'static str {
        match self {
            Baseline::Rouge1 => "rouge1-f1-nostem",
            Baseline::Rouge2 => "rouge2-f1-nostem",
            Baseline::RougeL => "rougeL-f1-nostem-whole-text",
            Baseline::EmbedGreedy => "embed-greedy-sentence-f1",
        }
    }

    /// Scores a candidate against a reference (the source document in the
    /// reference-free setting).
    pub fn score(
        self,
        candidate: &str,
        reference: &str,
        embedder: &dyn EmbeddingBackend,
    ) -> Result<f64, BaselineError> {
        Ok(match self {
            Baseline::Rouge1 => rouge_n(candidate, reference, 1).f1,
            Baseline::Rouge2 => rouge_n(candidate, reference, 2).f1,
            Baseline::RougeL => rouge_l(candidate, reference).f1,
            Baseline::EmbedGreedy => greedy_embedding_fscore(candidate, reference, embedder)?,
        })
    }
}

impl FromStr for Baseline {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rouge1" => Ok(Baseline::Rouge1),
            "rouge2" => Ok(Baseline::Rouge2),
            "rougeL" | "rougel" => Ok(Baseline::RougeL),
            "embed-greedy" => Ok(Baseline::EmbedGreedy),
            other => Err(BaselineError::Unknown(other.to_string())),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{hashed_embed, HashedEmbedder};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rouge_identity_and_empty() {
        let t = "the cat sat on the mat";
        for n in 1..=6 {
            let s = rouge_n(t, t, n);
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        }
        let z = rouge_n("", t, 1);
        assert_eq!((z.precision, z.recall, z.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rouge2_partial_overlap() {
        let s = rouge_n("the cat sat", "the cat sat on the mat", 2);
        assert_eq!(s.precision, 1.0);
        assert_abs_diff_eq!(s.recall, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.f1, 0.5714, epsilon = 1e-4);
    }

    #[test]
    fn rouge_clips_repeated_ngrams() {
        let s = rouge_n("the the the", "the cat", 1);
        assert_abs_diff_eq!(s.precision, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(s.recall, 0.5);
    }

    #[test]
    fn rouge_l_examples() {
        let s = rouge_l("the cat", "the cat sat");
        assert_eq!(s.precision, 1.0);
        assert_abs_diff_eq!(s.recall, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.f1, 0.8, epsilon = 1e-12);
        let d = rouge_l("alpha beta", "gamma delta");
        assert_eq!((d.precision, d.recall, d.f1), (0.0, 0.0, 0.0));
        let same = rouge_l("a b c", "a b c");
        assert_eq!((same.precision, same.recall, same.f1), (1.0, 1.0, 1.0));
        assert_eq!(lcs_len(&tokenize("a x b y c"), &tokenize("a b c")), 3);
    }

    #[test]
    fn greedy_identity_and_single_pair() {
        let t = "Cats purr. Dogs bark loudly.";
        assert_abs_diff_eq!(
            greedy_embedding_fscore(t, t, &HashedEmbedder).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let single = greedy_embedding_fscore("Cats purr loudly.", "Cats bark.", &HashedEmbedder).unwrap();
        let direct = cosine(&hashed_embed("Cats purr loudly."), &hashed_embed("Cats bark.")).unwrap();
        assert_abs_diff_eq!(single, direct, epsilon = 1e-12);
        assert!(matches!(
            greedy_embedding_fscore("...", t, &HashedEmbedder),
            Err(BaselineError::EmptyText("candidate"))
        ));
    }

    #[test]
    fn greedy_two_by_two_exhaustive() {
        let cand = ["Cats purr softly.", "Dogs bark."];
        let refs = ["Dogs bark at night.", "Birds sing."];
        let c: Vec<_> = cand.iter().map(|t| hashed_embed(t)).collect();
        let r: Vec<_> = refs.iter().map(|t| hashed_embed(t)).collect();
        let s = |i: usize, j: usize| cosine(&c[i], &r[j]).unwrap();
        let p = (s(0, 0).max(s(0, 1)) + s(1, 0).max(s(1, 1))) / 2.0;
        let rc = (s(0, 0).max(s(1, 0)) + s(0, 1).max(s(1, 1))) / 2.0;
        let expected = 2.0 * p * rc / (p + rc);
        let got = greedy_embedding_fscore(&cand.join(" "), &refs.join(" "), &HashedEmbedder).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        assert!(got > 0.0 && got < 1.0);
    }

    #[test]
    fn baseline_names() {
        assert_eq!("rouge2".parse::<Baseline>().unwrap(), Baseline::Rouge2);
        assert_eq!(Baseline::Rouge2.label(), "rouge2-f1-nostem");
        assert!("bleu".parse::<Baseline>().is_err());
    }

    fn text() -> impl Strategy<Value = String> {
        proptest::collection::vec(prop_oneof!["a", "b", "c", "d"], 0..10).prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn rouge_swap_exchanges_p_and_r(c in text(), r in text(), n in 1usize..4) {
            let ab = rouge_n(&c, &r, n);
            let ba = rouge_n(&r, &c, n);
            prop_assert_eq!(ab.precision, ba.recall);
            prop_assert_eq!(ab.recall, ba.precision);
            if tokenize(&c).len() < n || tokenize(&r).len() < n {
                prop_assert_eq!(ab.f1, 0.0);
            }
        }

        #[test]
        fn greedy_is_symmetric(a in proptest::collection::vec("[A-Z][a-d]{1,3}( [a-d]{1,3}){0,3}\\.", 1..4),
                               b in proptest::collection::vec("[A-Z][a-d]{1,3}( [a-d]{1,3}){0,3}\\.", 1..4)) {
            let (a, b) = (a.join(" "), b.join(" "));
            let ab = greedy_embedding_fscore(&a, &b, &HashedEmbedder).unwrap();
            let ba = greedy_embedding_fscore(&b, &a, &HashedEmbedder).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12);
        }
    }
}
