//! R/S estimator: the rescaled adjusted range of cumulative sums grows
//! like n_b^H with the block size n_b.

use super::regression::ols;
use super::{EstimateError, EstimateWarning, HurstEstimate, Method};

pub(crate) const MIN_LEN: usize = 256;
const MIN_BLOCK: usize = 64;
const MIN_FIT_POINTS: usize = 5;
/// Smallest series the default grid can fit five points on:
/// {64, 128, 256, 512, 1024} needs n/4 ≥ 1024.
pub(crate) const MIN_LEN_DEFAULT_GRID: usize = 4096;

/// Power-of-two block sizes from 64 up to n/4.
pub(crate) fn default_block_grid(n: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut b = MIN_BLOCK;
    while b <= n / 4 {
        grid.push(b);
        b *= 2;
    }
    grid
}

/// Rescaled range of one block: range of the cumulative mean-adjusted
/// sums over the block's standard deviation. `None` when the block is
/// constant (S = 0).
fn block_rs(block: &[f64]) -> Option<f64> {
    let nb = block.len() as f64;
    let mean = block.iter().sum::<f64>() / nb;
    let mut sum = 0.0;
    let mut max_w = f64::NEG_INFINITY;
    let mut min_w = f64::INFINITY;
    let mut ss = 0.0;
    for &x in block {
        let d = x - mean;
        sum += d;
        max_w = max_w.max(sum);
        min_w = min_w.min(sum);
        ss += d * d;
    }
    let s = (ss / nb).sqrt();
    if s == 0.0 {
        return None;
    }
    Some((max_w - min_w) / s)
}

pub fn rs_estimate(
    values: &[f64],
    block_grid: Option<&[usize]>,
) -> Result<HurstEstimate, EstimateError> {
    let n = values.len();
    if n < MIN_LEN {
        return Err(EstimateError::TooShort { need: MIN_LEN, got: n });
    }

    let default_grid;
    let grid: &[usize] = match block_grid {
        Some(g) => g,
        None => {
            if n < MIN_LEN_DEFAULT_GRID {
                return Err(EstimateError::TooShort {
                    need: MIN_LEN_DEFAULT_GRID,
                    got: n,
                });
            }
            default_grid = default_block_grid(n);
            &default_grid
        }
    };

    let mut log_nb = Vec::with_capacity(grid.len());
    let mut log_rs = Vec::with_capacity(grid.len());
    let mut last_nb = 0usize;
    for &nb in grid {
        if nb < 4 || nb == last_nb || nb > n / 2 {
            continue;
        }
        last_nb = nb;
        let mut total = 0.0;
        let mut kept = 0usize;
        for block in values.chunks_exact(nb) {
            if let Some(rs) = block_rs(block) {
                total += rs;
                kept += 1;
            }
        }
        if kept == 0 {
            continue;
        }
        log_nb.push((nb as f64).ln());
        log_rs.push((total / kept as f64).ln());
    }
    if log_nb.is_empty() {
        return Err(EstimateError::ZeroVariance);
    }
    if log_nb.len() < MIN_FIT_POINTS {
        return Err(EstimateError::TooShort {
            need: MIN_FIT_POINTS,
            got: log_nb.len(),
        });
    }

    let fit = ols(&log_nb, &log_rs);
    let h = fit.slope;
    let mut warnings = Vec::new();
    if !(h > 0.0 && h < 1.0) {
        warnings.push(EstimateWarning::OutOfRange);
    }
    if fit.r_squared < 0.9 {
        warnings.push(EstimateWarning::LowR2);
    }
    Ok(HurstEstimate {
        method: Method::Rs,
        h,
        beta: None,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points_used: log_nb.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_powers_of_two_to_quarter_length() {
        assert_eq!(
            default_block_grid(65536),
            vec![64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384]
        );
        assert_eq!(default_block_grid(4096), vec![64, 128, 256, 512, 1024]);
    }

    #[test]
    fn length_thresholds() {
        let x = vec![0.0; 100];
        assert_eq!(
            rs_estimate(&x, None).unwrap_err(),
            EstimateError::TooShort { need: 256, got: 100 }
        );
        // Long enough for the hard floor but not for five default grid
        // points.
        let x: Vec<f64> = (0..512).map(|i| f64::from(i % 7)).collect();
        assert_eq!(
            rs_estimate(&x, None).unwrap_err(),
            EstimateError::TooShort { need: 4096, got: 512 }
        );
        // A custom grid rescues the short series.
        let est = rs_estimate(&x, Some(&[8, 16, 32, 64, 128])).unwrap();
        assert_eq!(est.points_used, 5);
    }

    #[test]
    fn constant_series_has_no_rescaled_range() {
        let x = vec![5.0; 8192];
        assert_eq!(rs_estimate(&x, None).unwrap_err(), EstimateError::ZeroVariance);
    }

    #[test]
    fn block_rs_hand_computed() {
        // Block [1, 2, 3, 4]: mean 2.5, W = [-1.5, -2, -1.5, 0],
        // R = 0 − (−2) = 2, S = sqrt(1.25).
        let rs = block_rs(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((rs - 2.0 / 1.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(block_rs(&[7.0; 4]), None);
    }

    #[test]
    fn rs_is_scale_and_shift_invariant() {
        let x: Vec<f64> = (0..8192)
            .map(|i| (f64::from(i % 251) * 0.7).sin() + 0.1 * f64::from(i % 17))
            .collect();
        let base = rs_estimate(&x, None).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| 37.5 * v + 1000.0).collect();
        let moved = rs_estimate(&scaled, None).unwrap();
        assert!((base.h - moved.h).abs() < 1e-9);
    }
}
