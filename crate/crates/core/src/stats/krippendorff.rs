//! Krippendorff's alpha over annotator × item reliability data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Measurement level selecting the distance function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// `δ(c, k) = [c ≠ k]`
    Nominal,
    /// `δ(c, k) = (c − k)²`
    Interval,
}

impl Level {
    fn distance(self, c: f64, k: f64) -> f64 {
        match self {
            Level::Nominal => {
                if c == k {
                    0.0
                } else {
                    1.0
                }
            }
            Level::Interval => (c - k) * (c - k),
        }
    }
}

/// Rows are annotators, columns are items; `None` marks a missing judgement.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityMatrix {
    rows: Vec<Vec<Option<f64>>>,
    level: Level,
}

impl ReliabilityMatrix {
    pub fn new(rows: Vec<Vec<Option<f64>>>, level: Level) -> Result<Self, StatsError> {
        if rows.len() < 2 {
            return Err(StatsError::TooFewAnnotators);
        }
        let items = rows[0].len();
        if rows.iter().any(|r| r.len() != items) {
            return Err(StatsError::RaggedMatrix);
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(ReliabilityMatrix { rows, level })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn annotators(&self) -> usize {
        self.rows.len()
    }

    pub fn items(&self) -> usize {
        self.rows[0].len()
    }

    /// Values of each item with at least two judgements.
    fn pairable_units(&self) -> Vec<Vec<f64>> {
        (0..self.items())
            .map(|i| self.rows.iter().filter_map(|r| r[i]).collect::<Vec<f64>>())
            .filter(|u| u.len() >= 2)
            .collect()
    }
}

/// Value ordered by `total_cmp`; `-0.0` is folded into `0.0`.
#[derive(Debug, Clone, Copy)]
struct Key(f64);

impl Key {
    fn new(v: f64) -> Self {
        Key(v + 0.0)
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `α = 1 − D_o / D_e` from the coincidence matrix of pairable values.
///
/// Items judged by fewer than two annotators are excluded. At least two
/// pairable items are required.
pub fn krippendorff_alpha(matrix: &ReliabilityMatrix) -> Result<f64, StatsError> {
    let units = matrix.pairable_units();
    let n: usize = units.iter().map(Vec::len).sum();
    if units.len() < 2 || n < 2 {
        return Err(StatsError::InsufficientPairable {
            units: units.len(),
            values: n,
        });
    }
    let level = matrix.level();

    // Coincidences o_ck: each ordered pair of values within a unit, weighted by 1/(m_u - 1).
    let mut coincidence: BTreeMap<(Key, Key), f64> = BTreeMap::new();
    for unit in &units {
        let w = 1.0 / (unit.len() - 1) as f64;
        for (i, &c) in unit.iter().enumerate() {
            for (j, &k) in unit.iter().enumerate() {
                if i != j {
                    *coincidence.entry((Key::new(c), Key::new(k))).or_default() += w;
                }
            }
        }
    }
    let mut marginals: BTreeMap<Key, f64> = BTreeMap::new();
    for (&(c, _), &o) in &coincidence {
        *marginals.entry(c).or_default() += o;
    }
    let n = n as f64;
    let observed: f64 = coincidence
        .iter()
        .map(|(&(c, k), &o)| o * level.distance(c.0, k.0))
        .sum::<f64>()
        / n;
    let mut expected = 0.0;
    for (&c, &nc) in &marginals {
        for (&k, &nk) in &marginals {
            expected += nc * nk * level.distance(c.0, k.0);
        }
    }
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return Err(StatsError::NoExpectedDisagreement);
    }
    Ok(1.0 - observed / expected)
}
