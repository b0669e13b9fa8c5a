//! Seeded synthetic corpora for tests and benchmarks.
//!
//! Words are built from consonant-vowel syllables, so no generated token is
//! an abbreviation and every generated sentence segments exactly as written.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, SummaryRecord};
use crate::embedding::hashed_bucket;
use crate::segmenter::{tokenize, Segmenter};

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// The `i`-th two-syllable word; distinct for `i < 4900`.
pub fn word(i: usize) -> String {
    let syllables = CONSONANTS.len() * VOWELS.len();
    [i % syllables, (i / syllables) % syllables]
        .iter()
        .flat_map(|&s| [CONSONANTS[s / VOWELS.len()] as char, VOWELS[s % VOWELS.len()] as char])
        .collect()
}

fn sentence(words: &[String]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub documents: usize,
    /// Inclusive range of sentences per document.
    pub doc_sentences: (usize, usize),
    /// Inclusive range of sentences per summary.
    pub summary_sentences: (usize, usize),
    /// Summaries (systems) per document.
    pub systems: usize,
    pub vocabulary: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 15 documents of 200 sentences, one 10-sentence summary each.
    pub fn benchmark(seed: u64) -> Self {
        SyntheticSpec {
            documents: 15,
            doc_sentences: (200, 200),
            summary_sentences: (10, 10),
            systems: 1,
            vocabulary: 600,
            seed,
        }
    }

    /// Small corpus with 10-60 sentence documents and 2-8 sentence summaries.
    pub fn randomized(seed: u64) -> Self {
        SyntheticSpec {
            documents: 2,
            doc_sentences: (10, 60),
            summary_sentences: (2, 8),
            systems: 2,
            vocabulary: 300,
            seed,
        }
    }
}

/// Generates documents whose sentences are random word strings and summaries
/// that mostly reuse words from randomly chosen document sentences.
pub fn synthetic_corpus(spec: &SyntheticSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let segmenter = Segmenter::default();
    let vocab: Vec<String> = (0..spec.vocabulary.max(8)).map(word).collect();
    let mut documents = Vec::with_capacity(spec.documents);
    let mut summaries = Vec::with_capacity(spec.documents * spec.systems);
    for d in 0..spec.documents {
        let n = rng.gen_range(spec.doc_sentences.0..=spec.doc_sentences.1);
        let sentences: Vec<Vec<String>> = (0..n)
            .map(|_| {
                let len = rng.gen_range(5..=12);
                (0..len).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect()
            })
            .collect();
        let doc_id = format!("doc{d:03}");
        let text: Vec<String> = sentences.iter().map(|s| sentence(s)).collect();
        let doc = Document::new(&doc_id, text.join(" "), &segmenter);
        debug_assert_eq!(doc.sentences.len(), n);
        documents.push(doc);

        for system in 0..spec.systems {
            let j = rng.gen_range(spec.summary_sentences.0..=spec.summary_sentences.1);
            let summary: Vec<String> = (0..j)
                .map(|_| {
                    let source = sentences.choose(&mut rng).unwrap();
                    let keep = rng.gen_range(3..=source.len().min(6));
                    let mut words: Vec<String> = source.choose_multiple(&mut rng, keep).cloned().collect();
                    for _ in 0..rng.gen_range(0..=2) {
                        words.push(vocab.choose(&mut rng).unwrap().clone());
                    }
                    words.shuffle(&mut rng);
                    sentence(&words)
                })
                .collect();
            let record = SummaryRecord::new(&doc_id, format!("sys{system}"), summary.join(" "), &segmenter);
            debug_assert_eq!(record.sentences.len(), j);
            summaries.push(record);
        }
    }
    Corpus::new(documents, summaries).expect("generated ids are unique")
}

/// A document whose supporting evidence sits near its end, in two versions:
/// `base` keeps the evidence inside the first `token_limit` tokens, `padded`
/// pushes it past that boundary by prepending irrelevant sentences.
#[derive(Debug, Clone)]
pub struct EvidenceFixture {
    pub base: Document,
    pub padded: Document,
    pub summary: SummaryRecord,
    pub padding_sentences: usize,
    pub token_limit: usize,
}

impl EvidenceFixture {
    /// Buckets of the summary tokens under the hashed embedding.
    pub fn summary_buckets(&self) -> BTreeSet<usize> {
        tokenize(&self.summary.summary_text)
            .iter()
            .map(|t| hashed_bucket(t))
            .collect()
    }

    /// Corpus holding the padded document and the summary.
    pub fn padded_corpus(&self) -> Corpus {
        Corpus::new(vec![self.padded.clone()], vec![self.summary.clone()]).expect("single document")
    }
}

/// Builds the evidence-at-end fixture for a given truncation limit.
///
/// Every sentence outside the evidence block uses words whose hashed buckets
/// are disjoint from the summary's, so its hashed cosine to each summary
/// sentence is exactly 0. Each summary sentence has exactly three evidence
/// sentences with positive cosine.
pub fn evidence_at_end_fixture(token_limit: usize) -> EvidenceFixture {
    let segmenter = Segmenter::default();
    let mut summary_words: Vec<String> = Vec::new();
    let mut used = BTreeSet::new();
    for w in (0..).map(word) {
        if used.insert(hashed_bucket(&w)) {
            summary_words.push(w);
        }
        if summary_words.len() == 12 {
            break;
        }
    }
    let mut pool = (200..4900).map(word).filter(|w| !used.contains(&hashed_bucket(w)));
    let mut take = |n: usize| -> Vec<String> { pool.by_ref().take(n).collect() };
    let lead_words = take(40);
    let filler = take(24);
    let padding_words = take(60);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random_sentence = |vocab: &[String], len: usize| -> String {
        let words: Vec<String> = (0..len).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect();
        sentence(&words)
    };

    let lead: Vec<String> = (0..20).map(|_| random_sentence(&lead_words, 10)).collect();
    let tail: Vec<String> = (0..3).map(|_| random_sentence(&lead_words, 10)).collect();
    let padding: Vec<String> = (0..100)
        .map(|_| random_sentence(&padding_words, 1 + token_limit / 100))
        .collect();

    let s = &summary_words;
    let f = &filler;
    let cat =
        |parts: &[&[String]]| -> String { sentence(&parts.iter().flat_map(|p| p.iter().cloned()).collect::<Vec<_>>()) };
    let evidence = vec![
        cat(&[&s[0..4], &f[0..3]]),
        cat(&[&f[3..5], &s[2..6], &f[5..6]]),
        cat(&[&s[0..1], &f[6..9], &s[5..6]]),
        cat(&[&s[6..10], &f[9..12]]),
        cat(&[&f[12..14], &s[8..12], &f[14..15]]),
        cat(&[&s[6..7], &f[15..18], &s[11..12]]),
    ];
    let summary_text = format!("{} {}", sentence(&s[0..6]), sentence(&s[6..12]));

    let base_sentences: Vec<&String> = lead.iter().chain(&evidence).chain(&tail).collect();
    let padded_sentences: Vec<&String> = padding.iter().chain(base_sentences.iter().copied()).collect();
    let join = |v: &[&String]| v.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");

    let base = Document::new("evidence-at-end", join(&base_sentences), &segmenter);
    let padded = Document::new("evidence-at-end", join(&padded_sentences), &segmenter);
    let summary = SummaryRecord::new("evidence-at-end", "fixture", summary_text, &segmenter);
    debug_assert_eq!(padded.sentences.len(), base.sentences.len() + padding.len());
    EvidenceFixture {
        base,
        padded,
        summary,
        padding_sentences: padding.len(),
        token_limit,
    }
}
