//! Hypothesis tests for comparing roughness, error and rating distributions.
//!
//! All p-values are two-sided. Ties are resolved with average ranks.

pub mod dist;
mod nonparametric;
mod parametric;
pub mod table;

use serde::{Deserialize, Serialize};

pub use nonparametric::{
    average_ranks, friedman, holm_correct, holm_correct_with_family, spearman,
    wilcoxon_signed_rank, EXACT_WILCOXON_MAX_N,
};
pub use parametric::{games_howell, welch_anova, welch_t};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("degrees of freedom must be positive, got {0}")]
    InvalidDf(f64),
    #[error("sample `{label}` needs at least {needed} values, has {found}")]
    TooFewValues {
        label: String,
        needed: usize,
        found: usize,
    },
    #[error("sample `{0}` contains a non-finite value")]
    NonFinite(String),
    #[error("sample `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("t statistic is undefined: both samples are constant with different means")]
    UndefinedStatistic,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// A labelled vector of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: impl Into<Vec<f64>>) -> Self {
        Sample {
            label: label.into(),
            values: values.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (self.values.len() - 1) as f64
    }

    pub(crate) fn check(&self, min_len: usize) -> Result<(), StatsError> {
        if self.values.len() < min_len {
            return Err(StatsError::TooFewValues {
                label: self.label.clone(),
                needed: min_len,
                found: self.values.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(self.label.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df1: f64,
    pub df2: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamesHowellEntry {
    pub pair: (String, String),
    pub mean_diff: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi2: f64,
    pub df: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub w: f64,
    pub n_effective: usize,
    pub p: f64,
    pub method: WilcoxonMethod,
}

impl WilcoxonResult {
    pub fn degenerate(&self) -> bool {
        self.method == WilcoxonMethod::Degenerate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    pub p: f64,
}
