//! Cover of `E_{n,β}(w, δ1, δ2) = {x ∈ I_n(w) : δ1 ≤ ‖T^n x − x‖ ≤ δ2}`.
//!
//! On the cylinder `g(x) = T^n x − x = β^n (x − left) − x` is affine with
//! slope `β^n − 1`. The torus condition asks `g(x)` to lie in
//! `[k + δ1, k + δ2]` or `[k − δ2, k − δ1]` for an integer `k`, and each
//! window pulls back to one interval of length `(δ2 − δ1)/(β^n − 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beta::{BetaSystem, Word};
use crate::covering::{CoverReport, Coverage, Piece, SamplingPlan};
use crate::error::{argument, precondition, Result};
use crate::symbolic::{cylinder_interval, CylinderInterval};
use crate::targets::torus::circle_distance;

fn check_widths(delta1: f64, delta2: f64) -> Result<()> {
    if !(delta1.is_finite() && delta2.is_finite() && delta1 >= 0.0) {
        return Err(argument(format!("annulus radii must be finite with δ1 ≥ 0, got ({delta1}, {delta2})")));
    }
    if delta1 >= delta2 {
        return Err(argument(format!("annulus needs δ1 < δ2, got δ1 = {delta1}, δ2 = {delta2}")));
    }
    Ok(())
}

fn check_order(sys: &BetaSystem, n: usize) -> Result<()> {
    if sys.beta().powi(n as i32) <= 2.0 {
        return Err(precondition(format!(
            "annulus cover needs β^n > 2, got β = {}, n = {n}",
            sys.beta()
        )));
    }
    Ok(())
}

/// Pieces covering the annulus set inside an already computed cylinder.
pub(crate) fn pieces_on(sys: &BetaSystem, cyl: &CylinderInterval, delta1: f64, delta2: f64) -> Vec<(f64, f64)> {
    if !cyl.is_admissible() || delta1 > 0.5 {
        return Vec::new();
    }
    let scale = sys.beta().powi(cyl.order() as i32);
    let slope = scale - 1.0;
    let (a, b) = (cyl.left, cyl.right());
    let g_lo = -a;
    let g_hi = scale * cyl.length - b;
    let solve = |v: f64| (v + scale * a) / slope;
    let mut spans: Vec<(f64, f64)> = Vec::with_capacity(4);
    let k_min = (g_lo - delta2).floor() as i64;
    let k_max = (g_hi + delta2).ceil() as i64;
    for k in k_min..=k_max {
        let k = k as f64;
        for (lo_v, hi_v) in [(k + delta1, k + delta2), (k - delta2, k - delta1)] {
            if hi_v < g_lo || lo_v > g_hi {
                continue;
            }
            let span = (solve(lo_v).max(a), solve(hi_v).min(b));
            if span.1 >= span.0 {
                spans.push(span);
            }
        }
    }
    spans.sort_by(|p, q| p.0.total_cmp(&q.0).then(q.1.total_cmp(&p.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for s in spans {
        if !out.iter().any(|o| o.0 <= s.0 && s.1 <= o.1) {
            out.push(s);
        }
    }
    out
}

/// The intervals covering `E_{n,β}(w, δ1, δ2)`, at most four.
pub fn annulus_pieces(sys: &BetaSystem, word: &Word, delta1: f64, delta2: f64) -> Result<Vec<(f64, f64)>> {
    check_widths(delta1, delta2)?;
    check_order(sys, word.len())?;
    let cyl = cylinder_interval(sys, word)?;
    Ok(pieces_on(sys, &cyl, delta1, delta2))
}

/// Membership by the orbit of `x`: `Some(true/false)`, or `None` when the
/// point sits on a digit boundary or on the annulus boundary.
pub(crate) fn annulus_member(sys: &BetaSystem, word: &Word, x: f64, delta1: f64, delta2: f64) -> Option<bool> {
    let n = word.len();
    let e = sys.expand(x, n).ok()?;
    if e.is_ambiguous() {
        return None;
    }
    if e.word != *word {
        return Some(false);
    }
    let dist = circle_distance(sys.iterate(x, n).ok()?, x);
    let tol = 1e-12 + sys.beta().powi(n as i32) * 4.0 * f64::EPSILON;
    if (dist - delta1).abs() <= tol || (dist - delta2).abs() <= tol {
        return None;
    }
    Some(delta1 <= dist && dist <= delta2)
}

/// Cover of the annulus set of `w` with stratified coverage sampling.
pub fn cover_annulus(sys: &BetaSystem, word: &Word, delta1: f64, delta2: f64, plan: &SamplingPlan) -> Result<CoverReport> {
    check_widths(delta1, delta2)?;
    let n = word.len();
    check_order(sys, n)?;
    let cyl = cylinder_interval(sys, word)?;
    let pieces = pieces_on(sys, &cyl, delta1, delta2);
    let bound = 2.0 * (delta2 - delta1) * sys.full_length(n);

    let mut cov = Coverage::default();
    if cyl.is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let (a, len) = (cyl.left, cyl.length);
        let m = plan.stratified;
        let mut samples: Vec<f64> = (0..m).map(|j| a + (j as f64 + rng.gen::<f64>()) * len / m as f64).collect();
        samples.extend((0..plan.random).map(|_| a + rng.gen::<f64>() * len));
        for x in samples {
            if x >= a + len || x >= 1.0 {
                continue;
            }
            match annulus_member(sys, word, x, delta1, delta2) {
                None => cov.indeterminate += 1,
                Some(false) => {}
                Some(true) => {
                    cov.members += 1;
                    if pieces.iter().any(|&(lo, hi)| lo - 1e-15 <= x && x <= hi + 1e-15) {
                        cov.covered += 1;
                    }
                }
            }
        }
    }

    let mut notes = Vec::new();
    let longest = pieces.iter().map(|p| p.1 - p.0).fold(0.0, f64::max);
    if longest > bound {
        notes.push(format!("longest piece {longest} exceeds 2(δ2−δ1)β^-n = {bound}"));
    }
    if pieces.len() > 4 {
        notes.push(format!("{} pieces, more than 4", pieces.len()));
    }
    if !cyl.is_admissible() {
        notes.push(format!("word {word} is not admissible; the set is empty"));
    }
    Ok(CoverReport {
        kind: "annulus".into(),
        piece_count: pieces.len() as u64,
        pieces: pieces.iter().map(|&(lo, hi)| Piece::interval(lo, hi)).collect(),
        exponent: 1.0,
        total_s_weight: pieces.iter().map(|p| p.1 - p.0).sum(),
        claimed_bound: bound,
        ratio: None,
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

    #[test]
    fn zero_word_example() {
        let s = BetaSystem::new(2.0).unwrap();
        let p = annulus_pieces(&s, &Word::zeros(2), 0.0, 0.09).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].0, 0.0);
        assert!((p[0].1 - 0.03).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_short_orders_are_rejected() {
        let s = BetaSystem::new(2.0).unwrap();
        assert!(matches!(annulus_pieces(&s, &Word::zeros(2), 0.1, 0.1), Err(crate::Error::Argument(_))));
        assert!(matches!(annulus_pieces(&s, &Word::zeros(1), 0.0, 0.1), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn sampled_coverage_is_complete() {
        let s = BetaSystem::new(2.5).unwrap();
        for w in [vec![0, 0, 0], vec![2, 0, 1], vec![1, 2, 2], vec![2, 1, 0, 2]] {
            let r = cover_annulus(&s, &Word(w.clone()), 0.01, 0.2, &SamplingPlan::with_seed(11)).unwrap();
            assert_eq!(r.covered_fraction, 1.0, "{w:?}: {r:?}");
            assert!(r.piece_count <= 4);
            assert!(r.pieces.iter().all(|p| p.side() <= r.claimed_bound));
        }
    }

    #[test]
    fn wrap_around_window_near_the_left_end() {
        // On [0, β^-3) the image T^3 x sweeps up to 1, so ‖T^3 x − x‖ is also
        // small where T^3 x is close to 1.
        let s = BetaSystem::new(2.5).unwrap();
        let r = cover_annulus(&s, &Word::zeros(3), 0.0, 0.1, &SamplingPlan::with_seed(2)).unwrap();
        assert_eq!(r.piece_count, 2);
        let m = s.beta().powi(3) - 1.0;
        assert!((r.pieces[0].hi[0] - 0.1 / m).abs() < 1e-15);
        assert!((r.pieces[1].lo[0] - 0.9 / m).abs() < 1e-15);
        assert_eq!(r.covered_fraction, 1.0);
        assert!(r.members_sampled > 0);
    }
}
