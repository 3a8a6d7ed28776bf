//! Grid box counting on finite unions of intervals and their products.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

/// Grid boundaries closer than this to an interval endpoint do not count
/// as meeting the interval.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A finite union of closed intervals in `[0, 1]`, kept sorted by left end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(a, b)) = intervals.iter().find(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(argument(format!("[{a}, {b}] is not an interval")));
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self { intervals })
    }

    pub fn unit() -> Self {
        Self { intervals: vec![(0.0, 1.0)] }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of cells `[kε, (k+1)ε)` meeting the union.
    pub fn count(&self, eps: f64) -> u64 {
        let mut last: Option<i64> = None;
        let mut total = 0u64;
        for &(a, b) in &self.intervals {
            let mut lo = ((a + BOUNDARY_TOL) / eps).floor() as i64;
            let mut hi = ((b - BOUNDARY_TOL) / eps).ceil() as i64 - 1;
            if hi < lo {
                // Shorter than the tolerance band: the cell of the midpoint.
                lo = (0.5 * (a + b) / eps).floor() as i64;
                hi = lo;
            }
            let start = last.map_or(lo, |l| lo.max(l + 1));
            if hi >= start {
                total += (hi - start + 1) as u64;
            }
            last = Some(last.map_or(hi, |l| l.max(hi)));
        }
        total
    }
}

/// A set whose grid cells can be counted exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum BoxSet {
    Intervals(IntervalUnion),
    /// Cartesian product; product cells are counted as the product of the
    /// per-axis counts.
    Product(Vec<IntervalUnion>),
}

impl BoxSet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Intervals(_) => 1,
            Self::Product(axes) => axes.len(),
        }
    }

    pub fn count(&self, eps: f64) -> f64 {
        match self {
            Self::Intervals(u) => u.count(eps) as f64,
            Self::Product(axes) => axes.iter().map(|u| u.count(eps) as f64).product(),
        }
    }
}

/// `[0,1]^2`.
pub fn unit_square_fixture() -> BoxSet {
    BoxSet::Product(vec![IntervalUnion::unit(), IntervalUnion::unit()])
}

/// The `depth`-th stage of the middle-thirds construction.
pub fn cantor_fixture(depth: usize) -> BoxSet {
    let mut left = vec![0.0f64];
    let mut len = 1.0;
    for _ in 0..depth {
        len /= 3.0;
        left = left.iter().flat_map(|&a| [a, a + 2.0 * len]).collect();
    }
    BoxSet::Intervals(IntervalUnion {
        intervals: left.into_iter().map(|a| (a, a + len)).collect(),
    })
}

/// Ordinary least squares `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

pub fn fit_log_log(points: &[(f64, f64)]) -> Result<LogLogFit> {
    let m = points.len();
    if m < 2 {
        return Err(Error::Estimation("a slope needs at least two points".into()));
    }
    let mf = m as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Estimation("all resolutions coincide".into()));
    }
    if syy <= 0.0 {
        return Err(Error::Estimation("box counts are constant; no slope can be fitted".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if m > 2 {
        let ssr: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr.max(0.0) / (mf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LogLogFit { slope, intercept, stderr })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountResult {
    /// Resolutions in decreasing order.
    pub resolutions: Vec<f64>,
    pub counts: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub dim: usize,
    /// Adjacent resolution pairs with ratio exactly 2.
    pub dyadic_pairs: usize,
    /// Dyadic pairs breaking `N(ε) ≤ N(ε/2) ≤ 2^d N(ε)`.
    pub pair_violations: usize,
}

impl BoxCountResult {
    /// `slope ∈ [0, d]` up to three standard errors.
    pub fn slope_in_range(&self) -> bool {
        let slack = 3.0 * self.stderr + 1e-9;
        self.slope >= -slack && self.slope <= self.dim as f64 + slack
    }

    pub(crate) fn from_counts(dim: usize, resolutions: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        let points: Vec<(f64, f64)> = resolutions.iter().zip(&counts).map(|(e, n)| (-e.ln(), n.ln())).collect();
        let fit = fit_log_log(&points)?;
        let mut dyadic_pairs = 0;
        let mut pair_violations = 0;
        let cap = 2f64.powi(dim as i32);
        for k in 1..resolutions.len() {
            if ((resolutions[k - 1] / resolutions[k]) - 2.0).abs() < 1e-12 {
                dyadic_pairs += 1;
                let (coarse, fine) = (counts[k - 1], counts[k]);
                if !(coarse <= fine && fine <= cap * coarse) {
                    pair_violations += 1;
                }
            }
        }
        Ok(Self {
            resolutions,
            counts,
            slope: fit.slope,
            intercept: fit.intercept,
            stderr: fit.stderr,
            dim,
            dyadic_pairs,
            pair_violations,
        })
    }
}

/// Checks the resolution list: at least four distinct positive values
/// spanning a factor of four or more. Returns them in decreasing order.
pub(crate) fn checked_resolutions(resolutions: &[f64]) -> Result<Vec<f64>> {
    if let Some(e) = resolutions.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(argument(format!("resolution {e} is not a positive number")));
    }
    let mut eps = resolutions.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    if eps.len() < 4 {
        return Err(argument(format!("box counting needs at least 4 distinct resolutions, got {}", eps.len())));
    }
    let span = eps[0] / eps[eps.len() - 1];
    if span < 4.0 * (1.0 - 1e-12) {
        return Err(argument(format!("resolutions span a factor {span:.3}; at least two octaves are required")));
    }
    Ok(eps)
}

/// Least-squares slope of `ln N(ε)` against `ln(1/ε)`.
pub fn box_count(set: &BoxSet, resolutions: &[f64]) -> Result<BoxCountResult> {
    let eps = checked_resolutions(resolutions)?;
    let counts: Vec<f64> = eps.par_iter().map(|&e| set.count(e)).collect();
    if counts.iter().any(|&n| n == 0.0) {
        return Err(Error::Estimation("the set is empty at some resolution".into()));
    }
    BoxCountResult::from_counts(set.dim(), eps, counts)
}

/// `base^{-k}` for `k` in `range`.
pub fn geometric_resolutions(base: f64, range: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    range.map(|k| base.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_counts() {
        let u = IntervalUnion::new(vec![(0.3, 0.35), (0.0, 0.1), (0.32, 0.5)]).unwrap();
        // Cells of width 0.1: [0,0.1) and [0.3,0.5).
        assert_eq!(u.count(0.1), 3);
        assert_eq!(IntervalUnion::unit().count(0.25), 4);
        let point = IntervalUnion::new(vec![(0.42, 0.42)]).unwrap();
        assert_eq!(point.count(0.1), 1);
        assert!(IntervalUnion::new(vec![(0.5, 0.2)]).is_err());
    }

    #[test]
    fn square_calibration() {
        let r = box_count(&unit_square_fixture(), &geometric_resolutions(2.0, 1..=8)).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert_eq!(r.counts[0], 4.0);
        assert_eq!(r.dyadic_pairs, 7);
        assert_eq!(r.pair_violations, 0);
        assert!(r.slope_in_range());
    }

    #[test]
    fn cantor_calibration() {
        let r = box_count(&cantor_fixture(10), &geometric_resolutions(3.0, 1..=10)).unwrap();
        // Exactly 2^k triadic cells meet the depth-10 stage when k ≤ 10.
        let expected: Vec<f64> = (1..=10).map(|k| 2f64.powi(k)).collect();
        assert_eq!(r.counts, expected);
        assert!((r.slope - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn resolution_preconditions_and_degenerate_fit() {
        assert!(box_count(&unit_square_fixture(), &[0.5, 0.25, 0.2]).is_err());
        assert!(box_count(&unit_square_fixture(), &[0.5, 0.45, 0.4, 0.35]).is_err());
        let single = BoxSet::Intervals(IntervalUnion::new(vec![(0.5, 0.5)]).unwrap());
        assert!(matches!(
            box_count(&single, &geometric_resolutions(2.0, 1..=5)),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn fit_stderr_vanishes_on_exact_lines() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 0.3 * k as f64 + 1.0)).collect();
        let f = fit_log_log(&pts).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-12 && f.stderr < 1e-12);
        let noisy = [(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 3.0)];
        let f = fit_log_log(&noisy).unwrap();
        // slope 0.9, residuals (0.1, 0.2, −0.7, 0.4), ssr = 0.7, sxx = 5
        assert!((f.slope - 0.9).abs() < 1e-12);
        assert!((f.stderr - (0.7f64 / 2.0 / 5.0).sqrt()).abs() < 1e-12);
    }
}
