//! Correlation and agreement statistics for meta-evaluation.

mod kendall;
mod krippendorff;
mod linear;

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kendall::kendall_tau_b;
pub use krippendorff::{krippendorff_alpha, Level, ReliabilityMatrix};
pub use linear::{mid_ranks, pearson, spearman};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("paired sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFew(usize),
    #[error("non-finite value in sample")]
    NonFinite,
    #[error("every value of {0} is tied")]
    AllTied(&'static str),
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("reliability data needs at least 2 annotators")]
    TooFewAnnotators,
    #[error("reliability data has annotators with different item counts")]
    RaggedMatrix,
    #[error("insufficient pairable values: {units} pairable items, {values} values")]
    InsufficientPairable { units: usize, values: usize },
    #[error("expected disagreement is zero")]
    NoExpectedDisagreement,
    #[error("column {name:?} has length {len}, expected {expected}")]
    RaggedColumns { name: String, len: usize, expected: usize },
    #[error("unknown statistic {0:?}")]
    UnknownStatistic(String),
}

/// Two equally long, finite series.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl<'a> PairedSample<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Result<Self, StatsError> {
        if x.len() != y.len() {
            return Err(StatsError::LengthMismatch(x.len(), y.len()));
        }
        if x.len() < 2 {
            return Err(StatsError::TooFew(x.len()));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(PairedSample { x, y })
    }

    pub fn x(&self) -> &'a [f64] {
        self.x
    }

    pub fn y(&self) -> &'a [f64] {
        self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Correlation statistic used by the meta-evaluation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Kendall,
    Spearman,
    Pearson,
}

impl Statistic {
    pub fn compute(self, sample: &PairedSample<'_>) -> Result<f64, StatsError> {
        match self {
            Statistic::Kendall => kendall_tau_b(sample),
            Statistic::Spearman => spearman(sample),
            Statistic::Pearson => pearson(sample),
        }
    }

    /// Variant label for reports.
    pub fn label(self) -> &'static str {
        match self {
            Statistic::Kendall => "kendall-tau-b",
            Statistic::Spearman => "spearman-midrank",
            Statistic::Pearson => "pearson",
        }
    }
}

impl FromStr for Statistic {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" | "kendall-tau-b" | "tau" => Ok(Statistic::Kendall),
            "spearman" => Ok(Statistic::Spearman),
            "pearson" => Ok(Statistic::Pearson),
            _ => Err(StatsError::UnknownStatistic(s.to_string())),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Square matrix of pairwise correlations between named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub statistic: Statistic,
    pub n: usize,
}

/// Pairwise correlations of every column against every other, with a unit
/// diagonal.
pub fn correlation_matrix(
    table: &IndexMap<String, Vec<f64>>,
    statistic: Statistic,
) -> Result<CorrelationMatrix, StatsError> {
    let n = table.values().next().map_or(0, Vec::len);
    for (name, col) in table {
        if col.len() != n {
            return Err(StatsError::RaggedColumns {
                name: name.clone(),
                len: col.len(),
                expected: n,
            });
        }
    }
    let cols: Vec<&Vec<f64>> = table.values().collect();
    let m = cols.len();
    let mut values = vec![vec![1.0; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            let v = statistic.compute(&PairedSample::new(cols[a], cols[b])?)?;
            values[a][b] = v;
            values[b][a] = v;
        }
    }
    Ok(CorrelationMatrix {
        names: table.keys().cloned().collect(),
        values,
        statistic,
        n,
    })
}
