//! Monte-Carlo measures of finite-depth target sets and box-counting
//! estimates of the limsup sets built from them.

pub mod boxcount;
pub mod crosscheck;

pub use boxcount::{box_count, cantor_fixture, fit_log_log, geometric_resolutions, unit_square_fixture, BoxCountResult, BoxSet, IntervalUnion, LogLogFit};
pub use crosscheck::{
    calibrate, dimension_crosscheck, recurrence_balls, target_balls, BallLevel, CalibrationReport, CrosscheckConfig, CrosscheckKind, CrosscheckReport, LevelSummary,
    ResolutionPlan,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::BetaSystem;
use crate::error::{argument, Result};
use crate::targets::family::LipschitzFamily;
use crate::targets::torus::circle_distance;

/// Samples drawn from one random stream; shards are the unit of parallelism.
pub const SHARD_SIZE: usize = 4096;

const Z_95: f64 = 1.959_963_984_540_054;

/// A finite-depth set `A ⊂ 𝕋^d` with pointwise membership.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum MeasureSet {
    /// `Π_i ‖T_i^n x_i − x_i‖ < δ`.
    Recurrence { betas: Vec<f64>, n: usize, delta: f64 },
    /// `Π_i ‖T_i^n x_i − y_i‖ < ψ`.
    Hyperboloid { betas: Vec<f64>, n: usize, psi: f64, target: Vec<f64> },
    /// `‖T_i^n x_i − f_n^{(i)}(x)‖ < ψ_i` on every axis.
    Rectangle { betas: Vec<f64>, n: usize, family: LipschitzFamily, radii: Vec<f64> },
}

struct Prepared<'a> {
    set: &'a MeasureSet,
    axes: Vec<BetaSystem>,
}

impl MeasureSet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Recurrence { betas, .. } | Self::Hyperboloid { betas, .. } | Self::Rectangle { betas, .. } => betas.len(),
        }
    }

    fn prepare(&self) -> Result<Prepared<'_>> {
        let betas = match self {
            Self::Recurrence { betas, .. } | Self::Hyperboloid { betas, .. } | Self::Rectangle { betas, .. } => betas,
        };
        if betas.is_empty() {
            return Err(argument("a measured set needs at least one axis"));
        }
        let axes = betas.iter().map(|&b| BetaSystem::new(b)).collect::<Result<Vec<_>>>()?;
        let d = axes.len();
        match self {
            Self::Recurrence { delta, .. } if !(*delta > 0.0) => return Err(argument(format!("δ must be positive, got {delta}"))),
            Self::Hyperboloid { psi, target, .. } => {
                if !(*psi > 0.0) {
                    return Err(argument(format!("ψ must be positive, got {psi}")));
                }
                if target.len() != d {
                    return Err(argument(format!("target has {} coordinates, expected {d}", target.len())));
                }
            }
            Self::Rectangle { family, radii, .. } => {
                if family.dim() != d || radii.len() != d {
                    return Err(argument(format!("family and radii must have {d} coordinates")));
                }
                if radii.iter().any(|r| !(*r > 0.0)) {
                    return Err(argument("radii must be positive"));
                }
            }
            _ => {}
        }
        Ok(Prepared { set: self, axes })
    }
}

impl Prepared<'_> {
    fn contains(&self, x: &[f64]) -> Result<bool> {
        let image = |n: usize| -> Result<Vec<f64>> { self.axes.iter().zip(x).map(|(s, &xi)| s.iterate(xi, n)).collect() };
        Ok(match self.set {
            MeasureSet::Recurrence { n, delta, .. } => {
                let y = image(*n)?;
                y.iter().zip(x).map(|(&a, &b)| circle_distance(a, b)).product::<f64>() < *delta
            }
            MeasureSet::Hyperboloid { n, psi, target, .. } => {
                let y = image(*n)?;
                y.iter().zip(target).map(|(&a, &b)| circle_distance(a, b)).product::<f64>() < *psi
            }
            MeasureSet::Rectangle { n, family, radii, .. } => {
                let y = image(*n)?;
                let f = family.apply(*n, x);
                y.iter().zip(&f).zip(radii).all(|((&a, &b), &r)| circle_distance(a, b) < r)
            }
        })
    }
}

/// Lebesgue measure estimate with a 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub hits: usize,
    pub seed: u64,
    pub shards: usize,
}

impl MeasureEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// 95% Wilson score interval for `hits` successes out of `samples`.
pub fn wilson_interval(hits: usize, samples: usize) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == samples { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Uniform Monte-Carlo estimate of `L^d(A)`. Shard `k` draws from stream `k`
/// of a ChaCha8 generator seeded with `seed`, so the result does not depend
/// on the thread count.
pub fn measure_estimate(set: &MeasureSet, samples: usize, seed: u64) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(argument("measure estimation needs at least one sample"));
    }
    let prepared = set.prepare()?;
    let d = set.dim();
    let shards = samples.div_ceil(SHARD_SIZE);
    let hits = (0..shards)
        .into_par_iter()
        .map(|k| -> Result<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = SHARD_SIZE.min(samples - k * SHARD_SIZE);
            let mut x = vec![0.0; d];
            let mut hits = 0;
            for _ in 0..len {
                x.iter_mut().for_each(|v| *v = rng.gen::<f64>());
                hits += prepared.contains(&x)? as usize;
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    let (ci_low, ci_high) = wilson_interval(hits, samples);
    Ok(MeasureEstimate {
        estimate: hits as f64 / samples as f64,
        ci_low,
        ci_high,
        samples,
        hits,
        seed,
        shards,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{cover_annulus, SamplingPlan};
    use crate::symbolic::full_cylinders;
    use crate::targets::family::ScalarMap;

    #[test]
    fn wide_hyperboloid_is_everything() {
        // Every product of circle distances is at most 1/4 in d = 2.
        let set = MeasureSet::Hyperboloid {
            betas: vec![2.0, 3.0],
            n: 5,
            psi: 0.25 + 1e-9,
            target: vec![0.1, 0.7],
        };
        let m = measure_estimate(&set, 20_000, 1).unwrap();
        assert_eq!(m.hits, m.samples);
        assert_eq!(m.estimate, 1.0);
    }

    #[test]
    fn recurrence_measure_matches_exact_cover() {
        let beta = 2.0;
        let n = 6;
        let delta = 0.05;
        let sys = BetaSystem::new(beta).unwrap();
        // Exact length of {‖T^n x − x‖ < δ}: union of annulus pieces with δ1 = 0.
        let mut exact = 0.0;
        for cyl in full_cylinders(&sys, n, 1 << 12).unwrap() {
            let plan = SamplingPlan { stratified: 0, random: 0, seed: 0 };
            let report = cover_annulus(&sys, &cyl.word, 0.0, delta, &plan).unwrap();
            exact += report.pieces.iter().map(|p| p.hi[0] - p.lo[0]).sum::<f64>();
        }
        // T^6 x − x = 63x mod 1, so the set is 63 arcs of length 2δ/63.
        assert!((exact - 2.0 * delta).abs() < 1e-12, "{exact}");
        let set = MeasureSet::Recurrence { betas: vec![beta], n, delta };
        let m = measure_estimate(&set, 200_000, 9).unwrap();
        assert!(m.contains(exact), "{m:?} vs {exact}");
    }

    #[test]
    fn estimates_are_nested_and_reproducible() {
        let big = MeasureSet::Recurrence { betas: vec![2.5, 3.0], n: 4, delta: 0.02 };
        let small = MeasureSet::Recurrence { betas: vec![2.5, 3.0], n: 4, delta: 0.01 };
        let a = measure_estimate(&big, 50_000, 3).unwrap();
        let b = measure_estimate(&small, 50_000, 3).unwrap();
        // Same stream, coupled samples: the smaller set never gains hits.
        assert!(b.hits <= a.hits);
        assert!(b.ci_low <= a.ci_high);
        assert_eq!(measure_estimate(&big, 50_000, 3).unwrap(), a);
    }

    #[test]
    fn rectangle_and_errors() {
        let set = MeasureSet::Rectangle {
            betas: vec![2.0],
            n: 3,
            family: LipschitzFamily::uniform(ScalarMap::Constant { point: 0.5 }, 1),
            radii: vec![0.1],
        };
        // Preimage of an arc of length 0.2 under the doubling map has length 0.2.
        let m = measure_estimate(&set, 100_000, 2).unwrap();
        assert!(m.contains(0.2), "{m:?}");
        assert!(measure_estimate(&set, 0, 2).is_err());
        let bad = MeasureSet::Hyperboloid { betas: vec![2.0], n: 1, psi: 0.1, target: vec![] };
        assert!(measure_estimate(&bad, 10, 0).is_err());
    }

    #[test]
    fn wilson_limits() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
