//! Variance-time estimator: fit the decay of the aggregated-series
//! variance, var(X^{(m)}) ~ var(X)·m^{−β}, on a log-log grid and read
//! off h = 1 − β/2.

use super::regression::ols;
use super::{EstimateError, EstimateWarning, HurstEstimate, Method};
use crate::series::{aggregate_level, sample_mean_var};

pub(crate) const MIN_LEN: usize = 100;
const GRID_POINTS: usize = 20;
const MIN_BLOCKS: usize = 10;
const MIN_FIT_POINTS: usize = 5;
/// Fixed number of bias-correction refits. The iteration converges in
/// a handful of rounds; a fixed count keeps the estimator a pure
/// function with no data-dependent branching.
const REFIT_ROUNDS: usize = 32;

/// ~20 block sizes geometrically spaced in [1, n/10], so every level
/// keeps at least 10 blocks for its variance estimate.
pub(crate) fn default_m_grid(n: usize) -> Vec<usize> {
    let m_max = (n / MIN_BLOCKS).max(1);
    let ln_max = (m_max as f64).ln();
    let mut grid: Vec<usize> = (0..GRID_POINTS)
        .map(|i| {
            let t = i as f64 / (GRID_POINTS - 1) as f64;
            (ln_max * t).exp().round() as usize
        })
        .collect();
    grid.dedup();
    grid
}

pub fn variance_time_estimate(
    values: &[f64],
    m_grid: Option<&[usize]>,
) -> Result<HurstEstimate, EstimateError> {
    let n = values.len();
    if n < MIN_LEN {
        return Err(EstimateError::TooShort { need: MIN_LEN, got: n });
    }
    let (_, base_var) = sample_mean_var(values).expect("len >= 100");
    if base_var == 0.0 {
        return Err(EstimateError::ZeroVariance);
    }

    let default_grid;
    let grid: &[usize] = match m_grid {
        Some(g) => g,
        None => {
            default_grid = default_m_grid(n);
            &default_grid
        }
    };

    // Variance at each usable level, dropping degenerate ones.
    let mut log_m = Vec::with_capacity(grid.len());
    let mut log_v = Vec::with_capacity(grid.len());
    let mut blocks = Vec::with_capacity(grid.len());
    let mut last_m = 0usize;
    for &m in grid {
        if m == 0 || m == last_m || n / m < 2 {
            continue;
        }
        last_m = m;
        let agg = aggregate_level(values, m).expect("grid bounded by n/2");
        let (_, v) = sample_mean_var(&agg.values).expect("at least 2 blocks");
        if v <= 0.0 {
            continue;
        }
        log_m.push((m as f64).log10());
        log_v.push(v.log10());
        blocks.push(agg.values.len() as f64);
    }
    if log_m.len() < MIN_FIT_POINTS {
        return Err(EstimateError::TooShort {
            need: MIN_FIT_POINTS,
            got: log_m.len(),
        });
    }

    // The population variance of k block means systematically
    // undershoots the process variance: for a self-similar process,
    // E[v_m] = var(X^{(m)})·(1 − k^{2h−2}) with k blocks. The factor
    // depends on the h we are trying to estimate, so fit, correct the
    // levels with the current h, and refit.
    let mut fit = ols(&log_m, &log_v);
    for _ in 0..REFIT_ROUNDS {
        let hc = (1.0 + fit.slope / 2.0).clamp(0.01, 0.995);
        let corrected: Vec<f64> = log_v
            .iter()
            .zip(&blocks)
            .map(|(lv, k)| lv - (1.0 - k.powf(2.0 * hc - 2.0)).log10())
            .collect();
        fit = ols(&log_m, &corrected);
    }

    let beta = -fit.slope;
    let h = 1.0 - beta / 2.0;
    let mut warnings = Vec::new();
    if !(h > 0.0 && h < 1.0) {
        warnings.push(EstimateWarning::OutOfRange);
    }
    if fit.r_squared < 0.9 {
        warnings.push(EstimateWarning::LowR2);
    }
    Ok(HurstEstimate {
        method: Method::VarianceTime,
        h,
        beta: Some(beta),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points_used: log_m.len(),
        warnings,
    })
}
