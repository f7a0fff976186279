//! Hurst-exponent estimation for long-range dependence analysis.
//!
//! Four estimators over a real-valued series: the variance-time plot,
//! rescaled range (R/S), the low-frequency periodogram slope, and the
//! Whittle maximum-likelihood method. All are pure functions; all
//! mean-center internally, so estimates are shift- and
//! scale-invariant.

mod acov;
mod periodogram;
mod regression;
mod rescaled_range;
mod variance_time;
mod whittle;

pub use acov::{sample_acf, theoretical_acov, AcfProfile, DomainError};
pub use periodogram::{periodogram, periodogram_estimate};
pub use rescaled_range::rs_estimate;
pub use variance_time::variance_time_estimate;
pub use whittle::whittle_estimate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    VarianceTime,
    Rs,
    Periodogram,
    Whittle,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::VarianceTime,
        Method::Rs,
        Method::Periodogram,
        Method::Whittle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::VarianceTime => "variance_time",
            Method::Rs => "rs",
            Method::Periodogram => "periodogram",
            Method::Whittle => "whittle",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vt" | "variance_time" => Ok(Method::VarianceTime),
            "rs" => Ok(Method::Rs),
            "pgram" | "periodogram" => Ok(Method::Periodogram),
            "whittle" => Ok(Method::Whittle),
            other => Err(format!(
                "unknown method {other:?} (expected vt|rs|pgram|whittle)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateWarning {
    /// The point estimate fell outside (0, 1).
    OutOfRange,
    /// Log-log fit with r² < 0.9 (variance-time and R/S only; raw
    /// periodogram ordinates scatter too much for r² to be a useful
    /// flag there).
    LowR2,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimateError {
    /// Not enough data: either series samples or usable fit points.
    #[error("series too short: need {need}, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("search did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// One estimator's result on one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub method: Method,
    pub h: f64,
    /// Variance-decay exponent; present for variance_time, where
    /// h = 1 − beta/2 holds bit-exactly.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub warnings: Vec<EstimateWarning>,
}

/// Runs `method` with its default parameters.
pub fn estimate(method: Method, values: &[f64]) -> Result<HurstEstimate, EstimateError> {
    match method {
        Method::VarianceTime => variance_time_estimate(values, None),
        Method::Rs => rs_estimate(values, None),
        Method::Periodogram => {
            periodogram_estimate(values, periodogram::DEFAULT_FREQ_FRACTION)
        }
        Method::Whittle => whittle_estimate(values),
    }
}

/// H-value buckets used by the distribution reports. Lower-closed:
/// 0.45, 0.5 and 0.7 each belong to the bucket they open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HBucket {
    Lt045,
    Lt05,
    Lt07,
    Ge07,
}

impl HBucket {
    pub const ALL: [HBucket; 4] = [HBucket::Lt045, HBucket::Lt05, HBucket::Lt07, HBucket::Ge07];

    pub fn label(self) -> &'static str {
        match self {
            HBucket::Lt045 => "H < 0.45",
            HBucket::Lt05 => "0.45 < H < 0.5",
            HBucket::Lt07 => "0.5 < H < 0.7",
            HBucket::Ge07 => "H ≥ 0.7",
        }
    }

    pub fn idx(self) -> usize {
        match self {
            HBucket::Lt045 => 0,
            HBucket::Lt05 => 1,
            HBucket::Lt07 => 2,
            HBucket::Ge07 => 3,
        }
    }
}

impl std::fmt::Display for HBucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

pub fn bucket_h(h: f64) -> HBucket {
    if h < 0.45 {
        HBucket::Lt045
    } else if h < 0.5 {
        HBucket::Lt05
    } else if h < 0.7 {
        HBucket::Lt07
    } else {
        HBucket::Ge07
    }
}
