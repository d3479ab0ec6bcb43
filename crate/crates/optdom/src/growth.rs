//! Log-log regression on a schedule of truncated quantities.
//!
//! Finite data can only suggest how a sequence behaves at infinity, so the
//! output is framed as evidence with an estimated polynomial exponent, never
//! a certificate.

use serde::{Deserialize, Serialize};

/// Fitted slope below this reads as a plateau.
pub const BOUNDED_EXPONENT: f64 = 0.05;
/// Fitted slope above this reads as genuine polynomial growth.
pub const UNBOUNDED_EXPONENT: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    BoundedEvidence,
    UnboundedEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Least-squares slope of log(value) against log(n), when defined.
    pub exponent: Option<f64>,
    pub verdict: GrowthVerdict,
    /// Points entering the regression after windowing.
    pub points_used: usize,
}

impl GrowthFit {
    fn inconclusive(points_used: usize) -> Self {
        GrowthFit { exponent: None, verdict: GrowthVerdict::Inconclusive, points_used }
    }
}

/// Fit value ~ C * n^alpha from (n, value) samples with positive entries.
///
/// The smallest truncation is the most transient, so with four or more usable
/// points the first one is dropped before fitting.
pub fn fit_growth(points: &[(f64, f64)]) -> GrowthFit {
    let mut usable: Vec<(f64, f64)> =
        points.iter().copied().filter(|(n, v)| *n > 0.0 && *v > 0.0 && v.is_finite()).collect();
    if usable.len() >= 4 {
        usable.remove(0);
    }
    if usable.len() < 2 {
        return GrowthFit::inconclusive(usable.len());
    }

    let m = usable.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (n, v) in &usable {
        let (x, y) = (n.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return GrowthFit::inconclusive(usable.len());
    }
    let slope = (m * sxy - sx * sy) / denom;

    let verdict = if slope < BOUNDED_EXPONENT {
        GrowthVerdict::BoundedEvidence
    } else if slope > UNBOUNDED_EXPONENT {
        GrowthVerdict::UnboundedEvidence
    } else {
        GrowthVerdict::Inconclusive
    };
    GrowthFit { exponent: Some(slope), verdict, points_used: usable.len() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_sequence_reads_bounded() {
        let pts: Vec<(f64, f64)> =
            (1..=6).map(|k| ((1 << k) as f64, 3.0 + 0.001 * k as f64)).collect();
        let fit = fit_growth(&pts);
        assert_eq!(fit.verdict, GrowthVerdict::BoundedEvidence);
        assert!(fit.exponent.unwrap().abs() < 0.01);
        assert_eq!(fit.points_used, 5);
    }

    #[test]
    fn sqrt_growth_reads_unbounded() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|k| {
            let n = (1 << k) as f64;
            (n, n.sqrt())
        }).collect();
        let fit = fit_growth(&pts);
        assert_eq!(fit.verdict, GrowthVerdict::UnboundedEvidence);
        assert!((fit.exponent.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn logarithmic_growth_lands_between() {
        let pts: Vec<(f64, f64)> = (2..=7).map(|k| {
            let n = (1 << k) as f64;
            (n, n.ln().powf(0.6))
        }).collect();
        let fit = fit_growth(&pts);
        assert_eq!(fit.verdict, GrowthVerdict::Inconclusive);
    }

    #[test]
    fn degenerate_data_is_inconclusive() {
        assert_eq!(fit_growth(&[]).verdict, GrowthVerdict::Inconclusive);
        assert_eq!(fit_growth(&[(8.0, 1.0)]).verdict, GrowthVerdict::Inconclusive);
        assert_eq!(fit_growth(&[(8.0, 0.0), (16.0, 0.0)]).verdict, GrowthVerdict::Inconclusive);
        // Identical abscissae give nothing to regress on.
        assert_eq!(fit_growth(&[(8.0, 1.0), (8.0, 2.0)]).verdict, GrowthVerdict::Inconclusive);
    }
}
