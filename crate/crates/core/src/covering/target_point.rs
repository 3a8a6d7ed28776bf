//! Points of a full cylinder whose `n`-th image lands on a moving target, and
//! the small balls around them used in the lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beta::{BetaSystem, Word};
use crate::error::{argument, domain, precondition, Error, Result};
use crate::symbolic::{cylinder_interval, CylinderInterval};
use crate::targets::family::ScalarMap;
use crate::targets::torus::circle_distance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPoint {
    pub x: f64,
    /// `‖T^n x − g(x)‖` along the orbit of `x`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: f64,
    pub radius: f64,
    /// The target point the ball was built around.
    pub target: f64,
    pub shifted: bool,
    pub cylinder: (f64, f64),
}

impl Ball {
    pub fn interval(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallCheck {
    pub samples: usize,
    pub outside_cylinder: usize,
    pub outside_target: usize,
}

impl BallCheck {
    pub fn passed(&self) -> bool {
        self.outside_cylinder == 0 && self.outside_target == 0
    }
}

fn full_cylinder(sys: &BetaSystem, word: &Word, g: &ScalarMap) -> Result<CylinderInterval> {
    if word.is_empty() {
        return Err(argument("target points need a word of order at least 1"));
    }
    let cyl = cylinder_interval(sys, word)?;
    if !cyl.is_full() {
        return Err(domain(format!("word {word} does not span a full cylinder for base {}", sys.beta())));
    }
    let scale = sys.beta().powi(word.len() as i32);
    if scale <= g.lipschitz() {
        return Err(precondition(format!(
            "β^n = {scale} does not exceed the Lipschitz constant {}",
            g.lipschitz()
        )));
    }
    Ok(cyl)
}

/// `x ∈ I_n(w)` with `‖T^n x − g(x)‖ < ε`, found by bisection of
/// `h(x) = β^n (x − left) − g(x)` on a full cylinder.
pub fn find_target_point(sys: &BetaSystem, word: &Word, g: &ScalarMap, eps: f64) -> Result<TargetPoint> {
    if !(eps > 0.0) {
        return Err(argument(format!("ε must be positive, got {eps}")));
    }
    let cyl = full_cylinder(sys, word, g)?;
    let n = word.len();
    let scale = sys.beta().powi(n as i32);
    let (a, b) = (cyl.left, cyl.right());
    let h = |x: f64| scale * (x - a) - g.lift(n, x);
    let (ha, hb) = (h(a), h(b));
    if !(ha <= 0.0 && hb > 0.0) {
        return Err(Error::Construction(format!(
            "h changes no sign on I({word}): h(left) = {ha}, h(right) = {hb}"
        )));
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `lo` satisfies h ≤ 0 and stays inside the half-open cylinder.
    let x = lo;
    let residual = circle_distance(sys.iterate(x, n)?, g.apply(n, x));
    if !(residual < eps) {
        return Err(Error::Construction(format!(
            "orbit residual {residual} at x = {x} is not below ε = {eps}"
        )));
    }
    Ok(TargetPoint { x, residual })
}

/// The ball `B(x*, ψβ^{-n}/8)` inside `I_n(w)` on which `T^n` stays within
/// `ψ` of `f`. The centre moves inward by one radius when the target point is
/// within `ψβ^{-n}/4` of a cylinder endpoint.
pub fn ball_construction(sys: &BetaSystem, word: &Word, f: &ScalarMap, psi: f64) -> Result<Ball> {
    if !(psi > 0.0 && psi < 2.0) {
        return Err(argument(format!("ψ_n must lie in (0, 2), got {psi}")));
    }
    let target = find_target_point(sys, word, f, psi / 2.0)?.x;
    let cyl = cylinder_interval(sys, word)?;
    let n = word.len();
    let radius = psi * sys.full_length(n) / 8.0;
    let (a, b) = (cyl.left, cyl.right());
    let margin = 2.0 * radius;
    let (center, shifted) = if target - a < margin {
        (target + radius, true)
    } else if b - target < margin {
        (target - radius, true)
    } else {
        (target, false)
    };
    Ok(Ball {
        center,
        radius,
        target,
        shifted,
        cylinder: (a, b),
    })
}

/// Sample the open ball and check cylinder membership and
/// `‖T^n x − f(x)‖ ≤ ψ` along orbits.
pub fn verify_ball(sys: &BetaSystem, word: &Word, f: &ScalarMap, psi: f64, ball: &Ball, samples: usize, seed: u64) -> Result<BallCheck> {
    let n = word.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = ball.interval();
    let mut check = BallCheck {
        samples,
        outside_cylinder: 0,
        outside_target: 0,
    };
    for j in 0..samples {
        let x = lo + (hi - lo) * (j as f64 + rng.gen::<f64>()) / samples as f64;
        if !(ball.cylinder.0 <= x && x < ball.cylinder.1) || sys.expand(x, n)?.word != *word {
            check.outside_cylinder += 1;
            continue;
        }
        if circle_distance(sys.iterate(x, n)?, f.apply(n, x)) > psi {
            check.outside_target += 1;
        }
    }
    Ok(check)
}
