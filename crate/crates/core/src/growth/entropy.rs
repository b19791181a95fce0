//! Entropy reports from a ball census.
//!
//! `c(r + s) ≤ c(r) c(s)` makes `ln c(r)` subadditive, so by Fekete the
//! entropy is `inf_r ln c(r) / r`; every computed ratio is a true upper bound.
//! Finite balls give no lower bound.

use serde::Serialize;

use super::ball::BallCensus;
use super::fit::least_squares;
use crate::error::{Error, Result};

pub const DEFAULT_RESIDUAL_RATIO: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    PolynomialConsistent,
    ExponentialConsistent,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::PolynomialConsistent => "polynomial-consistent",
            Classification::ExponentialConsistent => "exponential-consistent",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub certified_upper: f64,
    /// Radius attaining the minimum of `ln c(r) / r`.
    pub certified_at: usize,
    /// Slope of `ln c(R)` on `R` over the window.
    pub regression_slope: f64,
    pub classification: Classification,
    pub window: (usize, usize),
    pub loglog_rms: f64,
    pub semilog_rms: f64,
    /// Set when the census was truncated and only its exact prefix was used.
    pub warning: Option<String>,
}

/// Report over the exact prefix of `census`, window `[⌈R/2⌉, R]`.
pub fn entropy_report(census: &BallCensus, ratio: f64) -> Result<EntropyReport> {
    let c = census.complete();
    let r_max = c.len() - 1;
    if r_max < 4 {
        return Err(Error::Parameter(format!(
            "entropy needs at least 4 exact radii; the census is exact up to R = {r_max}"
        )));
    }
    if !(ratio >= 1.0) {
        return Err(Error::Parameter(format!("residual ratio must be at least 1, got {ratio}")));
    }
    let (certified_at, certified_upper) = (1..=r_max)
        .map(|r| (r, (c[r] as f64).ln() / r as f64))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let window = (r_max.div_ceil(2), r_max);
    let semi: Vec<(f64, f64)> = (window.0..=window.1).map(|r| (r as f64, (c[r] as f64).ln())).collect();
    let loglog: Vec<(f64, f64)> = semi.iter().map(|&(r, y)| (r.ln(), y)).collect();
    let semi_fit = least_squares(&semi)?;
    let loglog_fit = least_squares(&loglog)?;
    let (ll, sl) = (loglog_fit.rms_residual, semi_fit.rms_residual);
    let constant = c[window.0..=window.1].iter().all(|&x| x == c[window.1]);
    let classification = if constant || sl > ratio * ll {
        Classification::PolynomialConsistent
    } else if ll > ratio * sl {
        Classification::ExponentialConsistent
    } else {
        Classification::Inconclusive
    };
    Ok(EntropyReport {
        certified_upper,
        certified_at,
        regression_slope: semi_fit.slope,
        classification,
        window,
        loglog_rms: ll,
        semilog_rms: sl,
        warning: census.truncated_at.map(|t| {
            format!("census truncated at radius {t}; report uses radii 0..={r_max} only")
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(c: Vec<u64>) -> BallCensus {
        let sphere = c
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == 0 { x } else { x - c[i - 1] })
            .collect();
        BallCensus {
            model_kind: "synthetic".into(),
            fingerprint: String::new(),
            requested_radius: c.len() - 1,
            cumulative: c,
            sphere,
            truncated_at: None,
        }
    }

    #[test]
    fn trivial_group() {
        let r = entropy_report(&census(vec![1; 9]), 3.0).unwrap();
        assert_eq!(r.certified_upper, 0.0);
        assert_eq!(r.classification, Classification::PolynomialConsistent);
    }

    #[test]
    fn free_group_closed_form() {
        let c: Vec<u64> = (0..=10).map(|r| 2 * 3u64.pow(r) - 1).collect();
        let r = entropy_report(&census(c), 3.0).unwrap();
        let expected = ((2 * 3u64.pow(10) - 1) as f64).ln() / 10.0;
        assert!((r.certified_upper - expected).abs() < 1e-12);
        assert!((r.certified_upper - 1.168).abs() < 1e-3);
        assert_eq!(r.certified_at, 10);
        assert_eq!(r.classification, Classification::ExponentialConsistent);
    }

    #[test]
    fn integers() {
        let c: Vec<u64> = (0..=10).map(|r| 2 * r + 1).collect();
        let r = entropy_report(&census(c), 3.0).unwrap();
        assert!((r.certified_upper - 21f64.ln() / 10.0).abs() < 1e-12);
        assert!(r.certified_upper < 0.35);
        assert_eq!(r.classification, Classification::PolynomialConsistent);
    }

    #[test]
    fn short_censuses_are_rejected() {
        assert!(entropy_report(&census(vec![1, 3, 5, 7]), 3.0).is_err());
    }
}
