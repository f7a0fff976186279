//! Periodogram estimator: for LRD the spectral density blows up at the
//! origin like λ^{1−2H}, so the low-frequency log-log slope of the
//! periodogram estimates 1 − 2H.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::regression::ols;
use super::{EstimateError, EstimateWarning, HurstEstimate, Method};

pub(crate) const MIN_LEN: usize = 64;
const MIN_FIT_POINTS: usize = 5;
pub(crate) const DEFAULT_FREQ_FRACTION: f64 = 0.1;

/// Periodogram ordinates I(λ_j) = |Σ_t x_t e^{−itλ_j}|²/(2πn) at the
/// Fourier frequencies λ_j = 2πj/n, j = 1..⌊(n−1)/2⌋, after mean
/// removal. The j = 0 (mean) and Nyquist ordinates are excluded.
pub fn periodogram(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&x| Complex::new(x - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (2.0 * std::f64::consts::PI * n as f64);
    (1..=(n - 1) / 2).map(|j| buf[j].norm_sqr() * scale).collect()
}

/// Fits ln I(λ_j) against ln λ_j over the lowest `freq_fraction` of
/// the spectrum (never fewer than five ordinates) and reads off
/// ĥ = (1 − slope)/2.
pub fn periodogram_estimate(
    values: &[f64],
    freq_fraction: f64,
) -> Result<HurstEstimate, EstimateError> {
    let n = values.len();
    if n < MIN_LEN {
        return Err(EstimateError::TooShort { need: MIN_LEN, got: n });
    }
    if values.iter().all(|&x| x == values[0]) {
        return Err(EstimateError::ZeroVariance);
    }

    let ords = periodogram(values);
    let j_max = ((freq_fraction * (n / 2) as f64).floor() as usize)
        .max(MIN_FIT_POINTS)
        .min(ords.len());
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut log_lambda = Vec::with_capacity(j_max);
    let mut log_i = Vec::with_capacity(j_max);
    for (idx, &i_j) in ords[..j_max].iter().enumerate() {
        if i_j <= 0.0 {
            continue;
        }
        let j = (idx + 1) as f64;
        log_lambda.push((two_pi * j / n as f64).ln());
        log_i.push(i_j.ln());
    }
    if log_lambda.len() < MIN_FIT_POINTS {
        return Err(EstimateError::TooShort {
            need: MIN_FIT_POINTS,
            got: log_lambda.len(),
        });
    }

    let fit = ols(&log_lambda, &log_i);
    let h = (1.0 - fit.slope) / 2.0;
    let mut warnings = Vec::new();
    if !(h > 0.0 && h < 1.0) {
        warnings.push(EstimateWarning::OutOfRange);
    }
    Ok(HurstEstimate {
        method: Method::Periodogram,
        h,
        beta: None,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        points_used: log_lambda.len(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_ties_ordinates_to_the_variance() {
        // Σ_j |X_j|² = n Σ_t x_t² for the DFT, so summing I over ALL
        // frequencies (both halves + Nyquist) recovers n·var/(2πn).
        let x: Vec<f64> = (0..256).map(|i| (f64::from(i) * 0.37).sin() * 2.0 + 5.0).collect();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        // Our half-spectrum ordinates cover j = 1..n/2−1; mirror them
        // and account for the Nyquist bin separately.
        let ords = periodogram(&x);
        let mut total = 2.0 * ords.iter().sum::<f64>();
        let mut buf: Vec<Complex<f64>> =
            x.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
        total += buf[x.len() / 2].norm_sqr() / (2.0 * std::f64::consts::PI * n);
        let expect = var * n / (2.0 * std::f64::consts::PI * n);
        assert!((total - expect * n).abs() < 1e-9 * expect.abs().max(1.0) * n);
    }

    #[test]
    fn pure_tone_concentrates_in_one_bin() {
        let n = 512;
        let j0 = 17;
        let x: Vec<f64> = (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * j0 as f64 * t as f64 / n as f64).cos())
            .collect();
        let ords = periodogram(&x);
        let (argmax, _) = ords
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_eq!(argmax + 1, j0);
    }

    #[test]
    fn length_and_variance_guards() {
        let x = vec![1.0; 32];
        assert_eq!(
            periodogram_estimate(&x, DEFAULT_FREQ_FRACTION).unwrap_err(),
            EstimateError::TooShort { need: 64, got: 32 }
        );
        let flat = vec![3.0; 128];
        assert_eq!(
            periodogram_estimate(&flat, DEFAULT_FREQ_FRACTION).unwrap_err(),
            EstimateError::ZeroVariance
        );
    }

    #[test]
    fn tiny_series_still_fit_five_ordinates() {
        let x: Vec<f64> = (0..64).map(|i| f64::from(i % 9) - 4.0).collect();
        let est = periodogram_estimate(&x, DEFAULT_FREQ_FRACTION).unwrap();
        // 0.1 · 32 = 3 would be too few; the floor lifts it to 5.
        assert!(est.points_used >= 5);
    }

    #[test]
    fn odd_lengths_exclude_the_mean_bin_only() {
        let x: Vec<f64> = (0..101).map(|i| f64::from(i % 13)).collect();
        assert_eq!(periodogram(&x).len(), 50);
        let y: Vec<f64> = (0..100).map(|i| f64::from(i % 13)).collect();
        assert_eq!(periodogram(&y).len(), 49);
    }
}
