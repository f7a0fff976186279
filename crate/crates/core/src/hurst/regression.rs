//! Ordinary least squares on small point sets, shared by the
//! log-log fitting estimators.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Unweighted OLS of y on x. A zero-spread y (ss_tot = 0) is a perfect
/// fit by convention: the horizontal line through the points.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> Fit {
    debug_assert_eq!(x.len(), y.len());
    debug_assert!(x.len() >= 2);
    let n = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - x_mean) * (xi - x_mean);
        sxy += (xi - x_mean) * (yi - y_mean);
    }
    debug_assert!(sxx > 0.0, "regression x values must not be all equal");
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let e = yi - (intercept + slope * xi);
        ss_res += e * e;
        ss_tot += (yi - y_mean) * (yi - y_mean);
    }
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Fit { slope, intercept, r_squared }
}
