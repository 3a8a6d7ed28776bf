//! Dyadic cover of `H_d(δ) = {y ∈ [0,1]^d : Π y_i ≤ δ}`.
//!
//! Starting from `[0,1]^d`, a dyadic cube is dropped when it misses `H_d(δ)`,
//! kept when it lies inside or its side is at most `δ`, and split into `2^d`
//! children otherwise. Cube sizes `|B|` are side lengths.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{CoverReport, Coverage, Piece, SamplingPlan};
use crate::error::{argument, Result};

/// `Π_i [index_i 2^{-level}, (index_i + 1) 2^{-level}]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    pub index: Vec<u64>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn lo(&self) -> Vec<f64> {
        let h = self.side();
        self.index.iter().map(|&i| i as f64 * h).collect()
    }

    pub fn piece(&self) -> Piece {
        let h = self.side();
        let lo = self.lo();
        Piece {
            hi: lo.iter().map(|v| v + h).collect(),
            lo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidOptions {
    /// Largest accepted `δ`.
    pub delta_max: f64,
    pub sampling: SamplingPlan,
    /// Include the cube list in the report.
    pub keep_pieces: bool,
}

impl Default for HyperboloidOptions {
    fn default() -> Self {
        Self {
            delta_max: 1e-2,
            sampling: SamplingPlan {
                stratified: 50_000,
                random: 50_000,
                seed: 0,
            },
            keep_pieces: false,
        }
    }
}

const MAX_LEVEL: u32 = 52;

fn subdivide(cube: DyadicCube, delta: f64, out: &mut Vec<DyadicCube>) {
    let h = cube.side();
    let lo = cube.lo();
    if lo.iter().product::<f64>() > delta * (1.0 + 1e-12) {
        return;
    }
    let inside = lo.iter().map(|v| v + h).product::<f64>() <= delta;
    if inside || h <= delta || cube.level >= MAX_LEVEL {
        out.push(cube);
        return;
    }
    for child in children(&cube) {
        subdivide(child, delta, out);
    }
}

fn children(cube: &DyadicCube) -> impl Iterator<Item = DyadicCube> + '_ {
    let d = cube.index.len();
    (0..1u64 << d).map(move |mask| DyadicCube {
        level: cube.level + 1,
        index: cube
            .index
            .iter()
            .enumerate()
            .map(|(i, &v)| 2 * v + ((mask >> i) & 1))
            .collect(),
    })
}

/// The dyadic cubes of the cover, for `d ≥ 2`; `d = 1` is the single
/// interval `[0, δ]` handled by [`cover_hyperboloid`].
pub fn hyperboloid_cubes(d: usize, delta: f64) -> Result<Vec<DyadicCube>> {
    if d == 0 {
        return Err(argument("dimension must be at least 1"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(argument(format!("δ must be positive, got {delta}")));
    }
    let root = DyadicCube {
        level: 0,
        index: vec![0; d],
    };
    // Split the first few levels eagerly so that subtrees run in parallel.
    let mut frontier = vec![root];
    let mut done = Vec::new();
    for _ in 0..3 {
        let mut next = Vec::new();
        for c in frontier {
            let h = c.side();
            let lo = c.lo();
            if lo.iter().product::<f64>() > delta * (1.0 + 1e-12) {
                continue;
            }
            let inside = lo.iter().map(|v| v + h).product::<f64>() <= delta;
            if inside || h <= delta {
                done.push(c);
            } else {
                next.extend(children(&c));
            }
        }
        frontier = next;
    }
    let rest: Vec<Vec<DyadicCube>> = frontier
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            subdivide(c, delta, &mut out);
            out
        })
        .collect();
    done.extend(rest.into_iter().flatten());
    Ok(done)
}

/// Lookup of which dyadic cubes are in a cover.
pub(crate) struct CubeIndex {
    set: HashSet<(u32, Vec<u64>)>,
    max_level: u32,
}

impl CubeIndex {
    pub fn new(cubes: &[DyadicCube]) -> Self {
        Self {
            max_level: cubes.iter().map(|c| c.level).max().unwrap_or(0),
            set: cubes.iter().map(|c| (c.level, c.index.clone())).collect(),
        }
    }

    /// Cubes of the cover whose half-open version contains `y`.
    pub fn containing(&self, y: &[f64]) -> Vec<DyadicCube> {
        let mut out = Vec::new();
        for level in 0..=self.max_level {
            let cells = (level as f64).exp2();
            let top = (1u64 << level) - 1;
            let index: Vec<u64> = y.iter().map(|&v| ((v * cells).floor().max(0.0) as u64).min(top)).collect();
            let key = (level, index);
            if self.set.contains(&key) {
                out.push(DyadicCube { level, index: key.1 });
            }
        }
        out
    }
}

fn in_hyperboloid(y: &[f64], delta: f64) -> Option<bool> {
    let p: f64 = y.iter().product();
    if (p - delta).abs() <= 1e-12 * delta {
        None
    } else {
        Some(p <= delta)
    }
}

/// Samples of `H_d(δ)`: stratified samples of the thin region along a
/// rotating axis, then uniform samples of the cube kept when they fall in.
fn samples(d: usize, delta: f64, plan: &SamplingPlan) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let m = plan.stratified;
    let mut out = Vec::with_capacity(plan.total());
    for j in 0..m {
        let axis = j % d;
        let mut y: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let others: f64 = y.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, v)| *v).product();
        let cap = if others > 0.0 { (delta / others).min(1.0) } else { 1.0 };
        y[axis] = cap * (j as f64 + rng.gen::<f64>()) / m as f64;
        out.push(y);
    }
    for _ in 0..plan.random {
        out.push((0..d).map(|_| rng.gen::<f64>()).collect());
    }
    out
}

/// Cover of `H_d(δ)` with its `s`-weight, the ratio against `δ^{s−d+1}`
/// and sampled coverage.
pub fn cover_hyperboloid(d: usize, delta: f64, s: f64, opts: &HyperboloidOptions) -> Result<CoverReport> {
    if d == 0 {
        return Err(argument("dimension must be at least 1"));
    }
    let df = d as f64;
    if !(s > df - 1.0 && s < df) {
        return Err(argument(format!("exponent s = {s} must lie in ({}, {d})", d - 1)));
    }
    if !(delta > 0.0 && delta < opts.delta_max) {
        return Err(argument(format!("δ = {delta} must lie in (0, {})", opts.delta_max)));
    }
    let claimed = delta.powf(s - df + 1.0);
    let plan = &opts.sampling;

    let (pieces, weight, count, cov) = if d == 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let mut cov = Coverage::default();
        let m = plan.stratified;
        let tail = (0..plan.random).map(|_| rng.gen::<f64>()).collect::<Vec<_>>();
        let head = (0..m).map(|j| delta * (j as f64 + rng.gen::<f64>()) / m as f64).collect::<Vec<_>>();
        for y in head.into_iter().chain(tail) {
            match in_hyperboloid(&[y], delta) {
                None => cov.indeterminate += 1,
                Some(false) => {}
                Some(true) => {
                    cov.members += 1;
                    if (0.0..=delta).contains(&y) {
                        cov.covered += 1;
                    }
                }
            }
        }
        (vec![Piece::interval(0.0, delta)], delta.powf(s), 1u64, cov)
    } else {
        let cubes = hyperboloid_cubes(d, delta)?;
        let weight: f64 = cubes.iter().map(|c| c.side().powf(s)).sum();
        let index = CubeIndex::new(&cubes);
        let pts = samples(d, delta, plan);
        let cov = pts
            .par_iter()
            .map(|y| match in_hyperboloid(y, delta) {
                None => Coverage {
                    indeterminate: 1,
                    ..Coverage::default()
                },
                Some(false) => Coverage::default(),
                Some(true) => Coverage {
                    members: 1,
                    covered: u64::from(!index.containing(y).is_empty()),
                    indeterminate: 0,
                },
            })
            .reduce(Coverage::default, Coverage::merge);
        let pieces = if opts.keep_pieces { cubes.iter().map(DyadicCube::piece).collect() } else { Vec::new() };
        (pieces, weight, cubes.len() as u64, cov)
    };

    let mut notes = Vec::new();
    if d > 1 && !opts.keep_pieces {
        notes.push("cube list omitted; enable keep_pieces to include it".into());
    }
    Ok(CoverReport {
        kind: "hyperboloid".into(),
        pieces,
        piece_count: count,
        exponent: s,
        total_s_weight: weight,
        claimed_bound: claimed,
        ratio: Some(weight / claimed),
        covered_fraction: cov.fraction(),
        members_sampled: cov.members,
        indeterminate: cov.indeterminate,
        miss_rate_upper_95: cov.miss_rate_upper_95(),
        seed: plan.seed,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(delta_max: f64) -> HyperboloidOptions {
        HyperboloidOptions {
            delta_max,
            ..HyperboloidOptions::default()
        }
    }

    #[test]
    fn one_dimensional_case_is_a_single_interval() {
        let r = cover_hyperboloid(1, 0.005, 0.4, &opts(0.01)).unwrap();
        assert_eq!(r.piece_count, 1);
        assert_eq!(r.pieces[0], Piece::interval(0.0, 0.005));
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.covered_fraction, 1.0);
    }

    #[test]
    fn exponent_and_delta_ranges() {
        assert!(cover_hyperboloid(2, 0.005, 2.0, &opts(0.01)).is_err());
        assert!(cover_hyperboloid(2, 0.005, 0.9, &opts(0.01)).is_err());
        assert!(cover_hyperboloid(2, 0.05, 1.5, &opts(0.01)).is_err());
    }

    #[test]
    fn cubes_cover_sampled_points() {
        for d in [2, 3] {
            let r = cover_hyperboloid(d, 1.0 / 128.0, d as f64 - 0.5, &opts(0.5)).unwrap();
            assert_eq!(r.covered_fraction, 1.0, "d = {d}: {r:?}");
            assert!(r.members_sampled > 50_000);
        }
    }

    #[test]
    fn every_cube_meets_the_set() {
        let delta = 1.0 / 64.0;
        for c in hyperboloid_cubes(2, delta).unwrap() {
            assert!(c.lo().iter().product::<f64>() <= delta);
        }
    }

    #[test]
    fn ratio_is_stable_across_scales() {
        let ratios: Vec<f64> = (4..=10)
            .map(|k| {
                let o = HyperboloidOptions {
                    delta_max: 1.0,
                    sampling: SamplingPlan { stratified: 0, random: 0, seed: 0 },
                    keep_pieces: false,
                };
                cover_hyperboloid(2, (-(k as f64)).exp2(), 1.5, &o).unwrap().ratio.unwrap()
            })
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 4.0, "{ratios:?}");
    }
}
