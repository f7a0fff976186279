//! Theoretical fGn autocovariance and the sample autocorrelation
//! profile.

use thiserror::Error;

use super::EstimateError;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("hurst parameter {0} outside (0, 1)")]
    InvalidH(f64),
    #[error("variance {0} must be positive")]
    InvalidSigma2(f64),
}

/// Autocovariance of fractional Gaussian noise:
///
/// γ(k) = σ²/2 · [(k+1)^{2h} − 2k^{2h} + |k−1|^{2h}],  γ(0) = σ².
///
/// The second difference telescopes to zero for h = 1/2 (white noise)
/// and decays like h(2h−1)σ²k^{2h−2} for large k — hyperbolically, the
/// defining signature of long-range dependence when h > 1/2.
pub fn theoretical_acov(h: f64, sigma2: f64, k: u64) -> Result<f64, DomainError> {
    if !(h > 0.0 && h < 1.0) {
        return Err(DomainError::InvalidH(h));
    }
    if sigma2 <= 0.0 || sigma2.is_nan() {
        return Err(DomainError::InvalidSigma2(sigma2));
    }
    if k == 0 {
        return Ok(sigma2);
    }
    let two_h = 2.0 * h;
    let k = k as f64;
    Ok(0.5 * sigma2 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h)))
}

/// Sample autocorrelations r(1)..r(max_lag) with the slow-decay flag.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfProfile {
    pub max_lag: usize,
    /// r[k-1] holds lag k; biased (1/n) normalization, so |r| ≤ 1.
    pub r: Vec<f64>,
    /// True when every available lag up to 10 stays above the 2/√n
    /// white-noise band — a screening heuristic, not a test.
    pub slow_decay_flag: bool,
}

pub fn sample_acf(values: &[f64], max_lag: usize) -> Result<AcfProfile, EstimateError> {
    assert!(max_lag >= 1, "max_lag must be at least 1");
    let n = values.len();
    if n < max_lag + 2 {
        return Err(EstimateError::TooShort { need: max_lag + 2, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let denom: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(EstimateError::ZeroVariance);
    }
    let mut r = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let num: f64 = values[..n - k]
            .iter()
            .zip(&values[k..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum();
        r.push(num / denom);
    }
    let band = 2.0 / nf.sqrt();
    let slow_decay_flag = r.iter().take(10).all(|&rk| rk > band);
    Ok(AcfProfile { max_lag, r, slow_decay_flag })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_acov_vanishes_at_positive_lags() {
        for k in 1..=1000 {
            let g = theoretical_acov(0.5, 1.0, k).unwrap();
            assert!(g.abs() <= 1e-12, "k={k}: {g}");
        }
        assert_eq!(theoretical_acov(0.5, 1.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn lag_one_value_for_h_07() {
        let g = theoretical_acov(0.7, 1.0, 1).unwrap();
        let want = 0.5 * (2f64.powf(1.4) - 2.0);
        assert!((g - want).abs() < 1e-15);
        assert!((g - 0.319508).abs() < 1e-6);
    }

    #[test]
    fn lag_zero_is_the_variance() {
        for h in [0.1, 0.5, 0.9] {
            assert_eq!(theoretical_acov(h, 2.0, 0).unwrap(), 2.0);
        }
    }

    #[test]
    fn positive_lags_are_positive_for_persistent_h() {
        for h in [0.55, 0.7, 0.9] {
            for k in [1, 2, 10, 100, 10_000] {
                assert!(theoretical_acov(h, 1.0, k).unwrap() > 0.0, "h={h} k={k}");
            }
        }
    }

    #[test]
    fn hyperbolic_tail_matches_the_asymptotic_constant() {
        // γ(k) → h(2h−1)σ²k^{2h−2}; the ratio should be within 1% by
        // k = 10^4.
        let k = 10_000u64;
        for h in [0.6, 0.75, 0.9] {
            let g = theoretical_acov(h, 1.0, k).unwrap();
            let asym = h * (2.0 * h - 1.0) * (k as f64).powf(2.0 * h - 2.0);
            let ratio = g / asym;
            assert!((0.99..=1.01).contains(&ratio), "h={h}: ratio {ratio}");
        }
    }

    #[test]
    fn domain_errors() {
        assert_eq!(theoretical_acov(0.0, 1.0, 1), Err(DomainError::InvalidH(0.0)));
        assert_eq!(theoretical_acov(1.0, 1.0, 1), Err(DomainError::InvalidH(1.0)));
        assert!(matches!(
            theoretical_acov(f64::NAN, 1.0, 1),
            Err(DomainError::InvalidH(_))
        ));
        assert_eq!(
            theoretical_acov(0.7, 0.0, 1),
            Err(DomainError::InvalidSigma2(0.0))
        );
        assert_eq!(
            theoretical_acov(0.7, -1.0, 1),
            Err(DomainError::InvalidSigma2(-1.0))
        );
    }

    #[test]
    fn alternating_series_is_anticorrelated_at_lag_one() {
        let x: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let prof = sample_acf(&x, 3).unwrap();
        assert!((prof.r[0] + 1.0).abs() < 0.01, "r(1) = {}", prof.r[0]);
        assert!(!prof.slow_decay_flag);
    }

    #[test]
    fn constant_series_has_no_acf() {
        let x = [3.0; 64];
        assert_eq!(sample_acf(&x, 5), Err(EstimateError::ZeroVariance));
    }

    #[test]
    fn too_short_for_requested_lag() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(
            sample_acf(&x, 5),
            Err(EstimateError::TooShort { need: 7, got: 3 })
        );
    }

    #[test]
    fn acf_magnitudes_are_bounded_by_one() {
        let x: Vec<f64> = (0..500).map(|i| f64::from(i % 13) * 0.7 - 2.0).collect();
        let prof = sample_acf(&x, 100).unwrap();
        for (k, rk) in prof.r.iter().enumerate() {
            assert!(rk.abs() <= 1.0 + 1e-12, "lag {}: {}", k + 1, rk);
        }
    }
}
