//! Least-squares power-law fits.

use alloc::vec::Vec;

/// Fit of `log₂ y = slope · log₂ x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log₂ y`.
    pub residual: f64,
    /// Standard error of the slope.
    pub slope_error: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFailure {
    TooFewPoints,
    /// Some `y` is zero, negative or not finite.
    Degenerate,
    /// All `x` coincide.
    NoSpread,
}

/// Ordinary least squares on `(log₂ x, log₂ y)`.
pub fn fit_log2(x: &[f64], y: &[f64]) -> Result<SlopeFit, FitFailure> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(FitFailure::TooFewPoints);
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(FitFailure::Degenerate);
    }
    let lx: Vec<f64> = x.iter().map(|v| libm::log2(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log2(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(FitFailure::NoSpread);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx.iter().zip(&ly).map(|(a, b)| {
        let e = b - intercept - slope * a;
        e * e
    }).sum();
    let slope_error = if lx.len() > 2 {
        libm::sqrt(ssr / (n - 2.0) / sxx)
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        residual: libm::sqrt(ssr / n),
        slope_error,
        points: lx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (2..=10).map(|j| 2f64.powi(-j)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.1625)).collect();
        let f = fit_log2(&x, &y).unwrap();
        assert!((f.slope - 0.1625).abs() < 1e-12);
        assert!((f.intercept - 3f64.log2()).abs() < 1e-12);
        assert!(f.residual < 1e-12 && f.slope_error < 1e-12);
    }

    #[test]
    fn noisy_fit_reports_residual() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y = [1.0, 2.2, 3.9, 8.4];
        let f = fit_log2(&x, &y).unwrap();
        assert!((f.slope - 1.0).abs() < 0.1);
        assert!(f.residual > 0.0 && f.slope_error > 0.0);
    }

    #[test]
    fn failures() {
        assert_eq!(fit_log2(&[1.0], &[1.0]), Err(FitFailure::TooFewPoints));
        assert_eq!(fit_log2(&[1.0, 2.0], &[0.0, 1.0]), Err(FitFailure::Degenerate));
        assert_eq!(fit_log2(&[2.0, 2.0], &[1.0, 3.0]), Err(FitFailure::NoSpread));
    }
}
