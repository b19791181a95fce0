//! Least-squares fits on log-log and semi-log axes.
//!
//! All sums run in input order so refitting the same data is bit-identical.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line fit `y ≈ slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub rms_residual: f64,
}

pub fn least_squares(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::Parameter("a line fit needs at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = points.iter().map(|p| p.1 - (slope * p.0 + intercept)).collect();
    Ok(LineFit {
        slope,
        intercept,
        max_residual: residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
        rms_residual: (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt(),
    })
}

/// Fit of `ln f(R)` against `ln R`: `f(R) ≈ leading_coefficient · R^degree`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialBoundFit {
    pub degree: f64,
    pub leading_coefficient: f64,
    pub max_residual: f64,
    pub window: (u64, u64),
    pub points: usize,
}

fn window_points(series: &[(u64, f64)], window: (u64, u64)) -> Result<Vec<(u64, f64)>> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::Parameter(format!("empty window [{lo}, {hi}]")));
    }
    let pts: Vec<(u64, f64)> = series
        .iter()
        .copied()
        .filter(|&(r, _)| r >= lo && r <= hi)
        .collect();
    if pts.len() < 3 {
        return Err(Error::Parameter(format!(
            "window [{lo}, {hi}] holds {} points; at least 3 are needed",
            pts.len()
        )));
    }
    if let Some(&(r, v)) = pts.iter().find(|&&(r, v)| r == 0 || !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Parameter(format!(
            "series must be positive on a window of positive radii (R = {r}, value = {v})"
        )));
    }
    Ok(pts)
}

pub fn fit_polynomial_degree(series: &[(u64, f64)], window: (u64, u64)) -> Result<PolynomialBoundFit> {
    let pts = window_points(series, window)?;
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(r, v)| ((r as f64).ln(), v.ln())).collect();
    let fit = least_squares(&logs)?;
    Ok(PolynomialBoundFit {
        degree: fit.slope,
        leading_coefficient: fit.intercept.exp(),
        max_residual: fit.max_residual,
        window,
        points: pts.len(),
    })
}

/// Fit of `ln f(R)` against `R`; the slope is an exponential rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub rate: f64,
    pub max_residual: f64,
    pub window: (u64, u64),
    pub points: usize,
}

pub fn fit_exponential_rate(series: &[(u64, f64)], window: (u64, u64)) -> Result<ExponentialFit> {
    let pts = window_points(series, window)?;
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(r, v)| (r as f64, v.ln())).collect();
    let fit = least_squares(&logs)?;
    Ok(ExponentialFit {
        rate: fit.slope,
        max_residual: fit.max_residual,
        window,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_has_degree_two() {
        let s: Vec<(u64, f64)> = (1..=20).map(|r| (r, (r * r) as f64)).collect();
        let f = fit_polynomial_degree(&s, (5, 20)).unwrap();
        assert!((f.degree - 2.0).abs() < 1e-9);
        assert!((f.leading_coefficient - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_rate_of_powers_of_three() {
        let s: Vec<(u64, f64)> = (0..=10).map(|r| (r, 3f64.powi(r as i32))).collect();
        let f = fit_exponential_rate(&s, (2, 10)).unwrap();
        assert!((f.rate - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_windows_are_rejected() {
        let s: Vec<(u64, f64)> = (1..=10).map(|r| (r, r as f64)).collect();
        assert!(fit_polynomial_degree(&s, (3, 4)).is_err());
        assert!(fit_polynomial_degree(&s, (8, 3)).is_err());
        let with_zero: Vec<(u64, f64)> = (1..=10).map(|r| (r, if r == 5 { 0.0 } else { 1.0 })).collect();
        assert!(fit_polynomial_degree(&with_zero, (1, 10)).is_err());
    }

    #[test]
    fn refits_are_identical() {
        let s: Vec<(u64, f64)> = (1..=30).map(|r| (r, (r as f64).powf(3.3) + 7.0)).collect();
        assert_eq!(fit_polynomial_degree(&s, (10, 30)).unwrap(), fit_polynomial_degree(&s, (10, 30)).unwrap());
    }
}
