//! Rule-based sentence segmentation and word tokenization.
//!
//! The rules are fixed so that segmentation is bit-stable across platforms:
//!
//! * A sentence ends after `.`, `!` or `?` when the terminator is immediately
//!   followed by whitespace and the next non-whitespace character is an
//!   uppercase letter or a digit.
//! * A `.` does not end a sentence when the text before it ends with one of the
//!   configured abbreviations (matched case-sensitively, on a word boundary).
//! * A whitespace run containing two or more newlines always ends a sentence.
//! * Segments without any word token are dropped.
//!
//! Decimal numbers such as `3.5` never split because the character after the
//! `.` is not whitespace.

use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

/// Abbreviations that suppress a sentence boundary after a trailing `.`.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "Dr", "Mr", "Mrs", "Ms", "Prof", "Fig", "Figs", "Eq", "Eqs", "et al", "e.g", "i.e", "vs", "etc", "No", "Vol", "pp",
    "cf", "approx", "Ref", "Refs", "Sec", "Jr", "Sr", "St", "resp",
];

static DEFAULT_SEGMENTER: LazyLock<Segmenter> = LazyLock::new(Segmenter::default);

/// A segmented sentence with its position in the parent text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub token_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmenter {
    abbreviations: Vec<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Segmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut abbreviations: Vec<String> = abbreviations
            .into_iter()
            .map(|a| a.as_ref().trim().trim_end_matches('.').to_string())
            .filter(|a| !a.is_empty())
            .collect();
        abbreviations.sort();
        abbreviations.dedup();
        Segmenter { abbreviations }
    }

    /// Loads an abbreviation list: one entry per line, blank lines and lines
    /// starting with `#` are skipped, a trailing `.` is optional.
    pub fn from_abbreviation_file(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Ok(Self::with_abbreviations(
            raw.lines().filter(|l| !l.trim_start().starts_with('#')),
        ))
    }

    pub fn abbreviations(&self) -> &[String] {
        &self.abbreviations
    }

    pub fn split_sentences(&self, text: &str) -> Vec<Sentence> {
        self.segments(text)
            .into_iter()
            .filter_map(|seg| {
                let trimmed = seg.trim();
                let token_count = count_tokens(trimmed);
                (token_count > 0).then(|| (trimmed.to_string(), token_count))
            })
            .enumerate()
            .map(|(index, (text, token_count))| Sentence {
                index,
                text,
                token_count,
            })
            .collect()
    }

    fn segments<'a>(&self, text: &'a str) -> Vec<&'a str> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                let mut j = i;
                let mut newlines = 0;
                while j < chars.len() && chars[j].1.is_whitespace() {
                    if chars[j].1 == '\n' {
                        newlines += 1;
                    }
                    j += 1;
                }
                if newlines >= 2 {
                    out.push(&text[start..pos]);
                    start = chars.get(j).map_or(text.len(), |&(p, _)| p);
                }
                i = j;
                continue;
            }
            if matches!(c, '.' | '!' | '?') {
                let end = pos + c.len_utf8();
                if self.is_boundary(text, start, &chars, i) {
                    out.push(&text[start..end]);
                    start = end;
                }
            }
            i += 1;
        }
        if start < text.len() {
            out.push(&text[start..]);
        }
        out
    }

    fn is_boundary(&self, text: &str, seg_start: usize, chars: &[(usize, char)], i: usize) -> bool {
        let (pos, c) = chars[i];
        match chars.get(i + 1) {
            Some(&(_, next)) if next.is_whitespace() => {}
            _ => return false,
        }
        let following = chars[i + 1..].iter().map(|&(_, ch)| ch).find(|ch| !ch.is_whitespace());
        match following {
            Some(ch) if ch.is_uppercase() || ch.is_numeric() => {}
            _ => return false,
        }
        c != '.' || !self.ends_with_abbreviation(&text[seg_start..pos])
    }

    fn ends_with_abbreviation(&self, before: &str) -> bool {
        self.abbreviations.iter().any(|abbr| {
            before
                .strip_suffix(abbr.as_str())
                .is_some_and(|rest| rest.chars().next_back().is_none_or(|ch| !ch.is_alphanumeric()))
        })
    }
}

/// Splits `text` with the default abbreviation list.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    DEFAULT_SEGMENTER.split_sentences(text)
}

/// Lowercased word tokens: maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub(crate) fn count_tokens(text: &str) -> usize {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .count()
}

/// Byte-prefix of `text` ending right after its `limit`-th token, so that
/// `tokenize(prefix)` is exactly the first `limit` tokens of `text`.
pub fn truncate_to_tokens(text: &str, limit: usize) -> &str {
    let mut seen = 0usize;
    let mut in_token = false;
    for (pos, c) in text.char_indices() {
        if c.is_alphanumeric() {
            if !in_token {
                if seen == limit {
                    return &text[..pos];
                }
                seen += 1;
                in_token = true;
            }
        } else {
            in_token = false;
        }
    }
    text
}
