//! Explicit covers used in the upper bounds and the ball construction used
//! in the lower bound, each with sampling-based verification.

pub mod annulus;
pub mod en;
pub mod hyperboloid;
pub mod target_point;

use serde::{Deserialize, Serialize};

pub use annulus::{annulus_pieces, cover_annulus};
pub use en::{cover_en, EnCoverReport};
pub use hyperboloid::{cover_hyperboloid, hyperboloid_cubes, DyadicCube, HyperboloidOptions};
pub use target_point::{ball_construction, find_target_point, verify_ball, Ball, BallCheck, TargetPoint};

/// How many verification samples to draw and from which seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// One sample per equal sub-cell of the sampled region.
    pub stratified: usize,
    /// Additional uniform samples.
    pub random: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            stratified: 10_000,
            random: 0,
            seed: 0,
        }
    }
}

impl SamplingPlan {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn total(&self) -> usize {
        self.stratified + self.random
    }
}

/// An axis-parallel closed box `Π [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Piece {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo], hi: vec![hi] }
    }

    /// Largest side length.
    pub fn side(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(x).all(|((a, b), v)| *a <= *v && *v <= *b)
    }
}

/// A cover together with its `s`-weight and sampled coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub kind: String,
    pub pieces: Vec<Piece>,
    pub piece_count: u64,
    /// Exponent `s` in `Σ|B|^s`.
    pub exponent: f64,
    pub total_s_weight: f64,
    pub claimed_bound: f64,
    /// `total_s_weight / claimed_bound` where the bound is a scaling law.
    pub ratio: Option<f64>,
    /// Fraction of sampled members of the covered set lying in some piece.
    pub covered_fraction: f64,
    pub members_sampled: u64,
    pub indeterminate: u64,
    /// Rule-of-three upper bound on the miss probability at 95 % confidence.
    pub miss_rate_upper_95: f64,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.covered_fraction >= 1.0
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Coverage {
    pub members: u64,
    pub covered: u64,
    pub indeterminate: u64,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        if self.members == 0 {
            1.0
        } else {
            self.covered as f64 / self.members as f64
        }
    }

    pub fn miss_rate_upper_95(&self) -> f64 {
        if self.members == 0 {
            1.0
        } else if self.covered == self.members {
            (3.0 / self.members as f64).min(1.0)
        } else {
            // Wilson upper limit for the observed miss proportion.
            let n = self.members as f64;
            let p = (self.members - self.covered) as f64 / n;
            let z = 1.96f64;
            let denom = 1.0 + z * z / n;
            ((p + z * z / (2.0 * n) + z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()) / denom).min(1.0)
        }
    }

    pub fn merge(self, other: Coverage) -> Coverage {
        Coverage {
            members: self.members + other.members,
            covered: self.covered + other.covered,
            indeterminate: self.indeterminate + other.indeterminate,
        }
    }
}
