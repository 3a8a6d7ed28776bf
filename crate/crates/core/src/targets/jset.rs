//! Sets `J = {x ∈ I_n(w) : |T^n x − f(x)| < ψ}` on a single cylinder.
//!
//! On `I_n(w)` the lift `h(x) = β^n (x − left) − f(x)` is increasing with
//! slope at least `β^n − c`, so `J` is the union over integers `k` of the
//! preimages `h^{-1}((k − ψ, k + ψ))`, each an interval. Affine targets are
//! solved in closed form, other targets by bisection.

use serde::{Deserialize, Serialize};

use crate::beta::{BetaSystem, Word};
use crate::error::{argument, precondition, Result};
use crate::symbolic::cylinder_interval;
use crate::targets::family::ScalarMap;

/// Padding applied to bisection endpoints.
pub const SOLVER_PAD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JSet {
    pub word: Word,
    pub cylinder: (f64, f64),
    /// Disjoint open intervals in increasing order.
    pub intervals: Vec<(f64, f64)>,
    pub total_length: f64,
    /// `4 ψ β^{-n}`.
    pub bound: f64,
    pub closed_form: bool,
}

impl JSet {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }
}

/// Whether `n` is large enough that the `4ψβ^{-n}` length bound is
/// guaranteed, `β^n ≥ 2c`.
pub fn j_set_bound_applies(sys: &BetaSystem, n: usize, lipschitz: f64) -> bool {
    sys.beta().powi(n as i32) >= 2.0 * lipschitz
}

fn invert_increasing(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64, target: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if h(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn merge(mut spans: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for (a, b) in spans {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// The intervals of `J_{n,β}(w)` for the map `f` at time `n = |w|`.
pub fn j_set(sys: &BetaSystem, word: &Word, f: &ScalarMap, psi: f64) -> Result<JSet> {
    if !(psi > 0.0 && psi.is_finite()) {
        return Err(argument(format!("radius must be positive, got {psi}")));
    }
    if word.is_empty() {
        return Err(argument("J-sets need a word of order at least 1"));
    }
    let n = word.len();
    let scale = sys.beta().powi(n as i32);
    let c = f.lipschitz();
    if scale <= c {
        return Err(precondition(format!(
            "β^n = {scale} does not exceed the Lipschitz constant {c}; need n > log_β c"
        )));
    }
    let cyl = cylinder_interval(sys, word)?;
    let bound = 4.0 * psi / scale;
    let (a, b) = (cyl.left, cyl.right());
    if !cyl.is_admissible() {
        return Ok(JSet {
            word: word.clone(),
            cylinder: (a, b),
            intervals: Vec::new(),
            total_length: 0.0,
            bound,
            closed_form: f.affine().is_some(),
        });
    }

    let h = |x: f64| scale * (x - a) - f.lift(n, x);
    let (h_lo, h_hi) = (h(a), h(b));
    let k_min = (h_lo - psi).floor() as i64;
    let k_max = (h_hi + psi).ceil() as i64;
    let mut spans = Vec::new();
    for k in k_min..=k_max {
        let (lo_v, hi_v) = (k as f64 - psi, k as f64 + psi);
        if hi_v <= h_lo || lo_v >= h_hi {
            continue;
        }
        let span = match f.affine() {
            Some((slope, offset)) => {
                let m = scale - slope;
                let solve = |v: f64| (v + scale * a + offset) / m;
                (solve(lo_v).max(a), solve(hi_v).min(b))
            }
            None => {
                let x_lo = if lo_v <= h_lo { a } else { (invert_increasing(&h, a, b, lo_v) - SOLVER_PAD).max(a) };
                let x_hi = if hi_v >= h_hi { b } else { (invert_increasing(&h, a, b, hi_v) + SOLVER_PAD).min(b) };
                (x_lo, x_hi)
            }
        };
        if span.1 > span.0 {
            spans.push(span);
        }
    }
    let intervals = merge(spans);
    let total_length = intervals.iter().map(|(x, y)| y - x).sum();
    Ok(JSet {
        word: word.clone(),
        cylinder: (a, b),
        intervals,
        total_length,
        bound,
        closed_form: f.affine().is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::family::CustomMap;
    use crate::targets::torus::circle_distance;

    #[test]
    fn constant_target_on_zero_cylinder() {
        // On [0, 1/8) the condition |8x − 0.5| < 0.1 gives (0.4/8, 0.6/8).
        let s = BetaSystem::new(2.0).unwrap();
        let j = j_set(&s, &Word::zeros(3), &ScalarMap::Constant { point: 0.5 }, 0.1).unwrap();
        assert_eq!(j.intervals.len(), 1);
        let (lo, hi) = j.intervals[0];
        assert!((lo - 0.05).abs() < 1e-15 && (hi - 0.075).abs() < 1e-15);
        assert!(j.contains(1.0 / 16.0));
        assert!(j.total_length <= j.bound);
    }

    #[test]
    fn wraparound_windows_are_found() {
        // Target near 0: T^n x near 1 also counts on the circle.
        let s = BetaSystem::new(2.0).unwrap();
        let j = j_set(&s, &Word(vec![0, 1]), &ScalarMap::Constant { point: 0.02 }, 0.05).unwrap();
        assert_eq!(j.intervals.len(), 2);
        for x in [0.25 + 0.001, 0.5 - 0.001] {
            let t = 4.0 * (x - 0.25);
            assert!(circle_distance(t, 0.02) < 0.05);
            assert!(j.contains(x));
        }
    }

    #[test]
    fn bisection_matches_closed_form() {
        let s = BetaSystem::new(2.5).unwrap();
        let w = Word(vec![1, 0, 2, 0]);
        let affine = ScalarMap::Affine { slope: 0.7, offset: 0.1 };
        let custom = ScalarMap::Custom(CustomMap::new("affine", 0.7, |_, x| 0.7 * x + 0.1));
        let a = j_set(&s, &w, &affine, 0.03).unwrap();
        let b = j_set(&s, &w, &custom, 0.03).unwrap();
        assert_eq!(a.intervals.len(), b.intervals.len());
        for (p, q) in a.intervals.iter().zip(&b.intervals) {
            assert!((p.0 - q.0).abs() <= 2.0 * SOLVER_PAD);
            assert!((p.1 - q.1).abs() <= 2.0 * SOLVER_PAD);
        }
        assert!(a.closed_form && !b.closed_form);
    }

    #[test]
    fn precondition_on_order() {
        let s = BetaSystem::new(2.0).unwrap();
        let f = ScalarMap::Affine { slope: 5.0, offset: 0.0 };
        assert!(matches!(j_set(&s, &Word(vec![0, 1]), &f, 0.1), Err(crate::Error::Precondition(_))));
        assert!(j_set(&s, &Word(vec![0, 1, 0]), &f, 0.1).is_ok());
    }

    #[test]
    fn inadmissible_word_gives_empty_set() {
        let g = BetaSystem::golden();
        let j = j_set(&g, &Word(vec![1, 1, 0]), &ScalarMap::Identity, 0.1).unwrap();
        assert!(j.intervals.is_empty());
    }
}
