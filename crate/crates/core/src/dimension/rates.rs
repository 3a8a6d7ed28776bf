//! Decay rates `−ln ψ(n)/n`: the liminf `τ` and the accumulation set of the
//! rate vector of a family `(ψ_1, …, ψ_d)`.
//!
//! Closed forms are resolved analytically along residue classes of `n`.
//! Sampled tables use an explicit tail window, so the result is a finite
//! data heuristic and carries the window it was computed on.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::targets::psi::PsiSpec;

/// Default clustering radius (sup norm) for sampled accumulation points.
pub const DEFAULT_CLUSTER_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    /// Fraction of the samples, counted from the end.
    pub fraction: f64,
    pub min_samples: usize,
}

impl Default for TailWindow {
    fn default() -> Self {
        Self {
            fraction: 0.25,
            min_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub first: usize,
    pub last: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// `liminf −ln ψ(n)/n`; for a family, the smallest coordinate liminf.
    #[serde(with = "crate::extreal")]
    pub tau: f64,
    pub accumulation_points: Vec<Vec<f64>>,
    pub closed_form: bool,
    pub window: Option<WindowInfo>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Limit {
    Finite(f64),
    PlusInf,
    MinusInf,
}

impl Limit {
    fn rank(self) -> f64 {
        match self {
            Limit::Finite(v) => v,
            Limit::PlusInf => f64::INFINITY,
            Limit::MinusInf => f64::NEG_INFINITY,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Limits of the rate along `n ≡ r (mod p)` for `r = 0..p`, or `None` when
/// some part is sampled.
fn class_limits(psi: &PsiSpec) -> Option<Vec<Limit>> {
    match psi {
        PsiSpec::Exponential { rate, .. } => Some(vec![Limit::Finite(-rate)]),
        PsiSpec::Power { .. } => Some(vec![Limit::Finite(0.0)]),
        PsiSpec::Stretched { rate, power, .. } => Some(vec![if *power < 1.0 || *rate == 0.0 {
            Limit::Finite(0.0)
        } else if *power == 1.0 {
            Limit::Finite(-rate)
        } else if *rate < 0.0 {
            Limit::PlusInf
        } else {
            Limit::MinusInf
        }]),
        PsiSpec::Alternating { odd, even } => {
            let o = class_limits(odd)?;
            let e = class_limits(even)?;
            let p = lcm(2, lcm(o.len(), e.len()));
            Some(
                (0..p)
                    .map(|r| if r % 2 == 1 { o[r % o.len()] } else { e[r % e.len()] })
                    .collect(),
            )
        }
        PsiSpec::Table { .. } => None,
    }
}

fn clamp_rate(v: f64, warnings: &mut Vec<String>) -> f64 {
    if v < 0.0 {
        warnings.push(format!("rate {v} is negative (ψ grows); clamped to 0"));
        0.0
    } else {
        v
    }
}

fn cluster(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut reps: Vec<(Vec<f64>, usize)> = Vec::new();
    for p in points {
        let hit = reps.iter_mut().find(|(sum, k)| {
            sum.iter()
                .zip(p)
                .all(|(s, v)| (s / *k as f64 - v).abs() <= tol)
        });
        match hit {
            Some((sum, k)) => {
                for (s, v) in sum.iter_mut().zip(p) {
                    *s += v;
                }
                *k += 1;
            }
            None => reps.push((p.clone(), 1)),
        }
    }
    reps.into_iter()
        .map(|(sum, k)| sum.into_iter().map(|s| s / k as f64).collect())
        .collect()
}

fn window_range(horizon: usize, window: &TailWindow) -> Result<(usize, usize)> {
    if !(window.fraction > 0.0 && window.fraction <= 1.0) {
        return Err(argument(format!("window fraction {} must lie in (0, 1]", window.fraction)));
    }
    if horizon < window.min_samples.max(1) {
        return Err(Error::Estimation(format!(
            "{horizon} samples of ψ, at least {} needed",
            window.min_samples.max(1)
        )));
    }
    let size = ((horizon as f64 * window.fraction).ceil() as usize).max(window.min_samples).min(horizon);
    Ok((horizon - size + 1, horizon))
}

/// `τ = liminf −ln ψ(n)/n`, clamped at 0 with a warning when ψ grows.
pub fn tau_estimate(psi: &PsiSpec, window: &TailWindow) -> Result<RateSummary> {
    psi.validate()?;
    let mut warnings = Vec::new();
    if let Some(limits) = class_limits(psi) {
        let tau = limits.iter().map(|l| l.rank()).fold(f64::INFINITY, f64::min);
        let tau = if tau == f64::NEG_INFINITY {
            warnings.push("ψ grows superexponentially along a subsequence; τ clamped to 0".into());
            0.0
        } else if tau.is_finite() {
            clamp_rate(tau, &mut warnings)
        } else {
            tau
        };
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for l in &limits {
            let v = match l {
                Limit::Finite(v) => v.max(0.0),
                Limit::MinusInf => 0.0,
                Limit::PlusInf => continue,
            };
            if !pts.iter().any(|p| p[0] == v) {
                pts.push(vec![v]);
            }
        }
        return Ok(RateSummary {
            tau,
            accumulation_points: pts,
            closed_form: true,
            window: None,
            warnings,
        });
    }
    let horizon = psi.horizon().unwrap_or(0);
    let (first, last) = window_range(horizon, window)?;
    let rates: Vec<f64> = (first..=last).map(|n| psi.rate_at(n)).collect::<Result<_>>()?;
    let tau = clamp_rate(rates.iter().cloned().fold(f64::INFINITY, f64::min), &mut warnings);
    let pts: Vec<Vec<f64>> = rates.iter().map(|&r| vec![r.max(0.0)]).collect();
    Ok(RateSummary {
        tau,
        accumulation_points: cluster(&pts, DEFAULT_CLUSTER_TOL),
        closed_form: false,
        window: Some(WindowInfo {
            first,
            last,
            samples: last - first + 1,
        }),
        warnings,
    })
}

/// Accumulation points of `(−ln ψ_1(n)/n, …, −ln ψ_d(n)/n)`.
///
/// `horizon` caps the sampled range for tables. A coordinate tending to
/// `+∞` along some residue class, or a sampled tail that grows by more
/// than one unit and half again across the window, is reported as an
/// unbounded set.
pub fn accumulation_set(psis: &[PsiSpec], tol: f64, horizon: Option<usize>, window: &TailWindow) -> Result<RateSummary> {
    if psis.is_empty() {
        return Err(argument("need at least one ψ"));
    }
    if !(tol > 0.0) {
        return Err(argument(format!("clustering radius must be positive, got {tol}")));
    }
    for p in psis {
        p.validate()?;
    }
    let mut warnings = Vec::new();
    let classes: Option<Vec<Vec<Limit>>> = psis.iter().map(class_limits).collect();
    if let Some(classes) = classes {
        let period = classes.iter().fold(1, |p, c| lcm(p, c.len()));
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for r in 0..period {
            let mut point = Vec::with_capacity(psis.len());
            for (i, c) in classes.iter().enumerate() {
                match c[r % c.len()] {
                    Limit::PlusInf => {
                        return Err(Error::UnboundedRates(format!(
                            "rate of ψ_{} tends to +∞ along n ≡ {r} (mod {period})",
                            i + 1
                        )))
                    }
                    Limit::MinusInf => {
                        warnings.push(format!("rate of ψ_{} tends to −∞; clamped to 0", i + 1));
                        point.push(0.0);
                    }
                    Limit::Finite(v) => point.push(clamp_rate(v, &mut warnings)),
                }
            }
            pts.push(point);
        }
        let pts = cluster(&pts, tol.min(1e-12));
        let tau = pts.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
        return Ok(RateSummary {
            tau,
            accumulation_points: pts,
            closed_form: true,
            window: None,
            warnings,
        });
    }

    let sampled = psis.iter().filter_map(PsiSpec::horizon).min().unwrap_or(0);
    let h = horizon.map_or(sampled, |h| h.min(sampled));
    let (first, last) = window_range(h, window)?;
    let vectors: Vec<Vec<f64>> = (first..=last)
        .map(|n| psis.iter().map(|p| p.rate_at(n)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let sup: Vec<f64> = vectors.iter().map(|v| v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))).collect();
    let third = (sup.len() / 3).max(1);
    let head = sup[..third].iter().sum::<f64>() / third as f64;
    let tail = sup[sup.len() - third..].iter().sum::<f64>() / third as f64;
    if tail - head > 1.0 && tail > 1.5 * head {
        return Err(Error::UnboundedRates(format!(
            "sampled rates grow from {head:.3} to {tail:.3} across the window n = {first}..{last}"
        )));
    }
    let clamped: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| clamp_rate(x, &mut warnings)).collect())
        .collect();
    warnings.dedup();
    let pts = cluster(&clamped, tol);
    let tau = clamped.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    Ok(RateSummary {
        tau,
        accumulation_points: pts,
        closed_form: false,
        window: Some(WindowInfo {
            first,
            last,
            samples: last - first + 1,
        }),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_taus() {
        let w = TailWindow::default();
        assert_eq!(tau_estimate(&PsiSpec::exponential(-2.0), &w).unwrap().tau, 2.0);
        assert_eq!(tau_estimate(&PsiSpec::power(-3.0), &w).unwrap().tau, 0.0);
        let alt = PsiSpec::alternating(PsiSpec::exponential(-1.0), PsiSpec::exponential(-2.0));
        let r = tau_estimate(&alt, &w).unwrap();
        assert_eq!(r.tau, 1.0);
        assert_eq!(r.accumulation_points.len(), 2);
        let fast = PsiSpec::stretched(-1.0, 2.0).unwrap();
        assert_eq!(tau_estimate(&fast, &w).unwrap().tau, f64::INFINITY);
    }

    #[test]
    fn growing_psi_clamps_to_zero() {
        let r = tau_estimate(&PsiSpec::exponential(0.3), &TailWindow::default()).unwrap();
        assert_eq!(r.tau, 0.0);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn sampled_tau_uses_tail_window() {
        let values: Vec<f64> = (1..=400).map(|n| (-1.5 * n as f64 + (n as f64).sin()).exp()).collect();
        let r = tau_estimate(&PsiSpec::table(values).unwrap(), &TailWindow::default()).unwrap();
        let w = r.window.clone().unwrap();
        assert_eq!((w.first, w.last, w.samples), (301, 400, 100));
        let oracle = (301..=400).map(|n| 1.5 - (n as f64).sin() / n as f64).fold(f64::INFINITY, f64::min);
        assert!((r.tau - oracle).abs() < 1e-12);
        let short = PsiSpec::table(vec![0.5; 50]).unwrap();
        assert!(matches!(tau_estimate(&short, &TailWindow::default()), Err(Error::Estimation(_))));
    }

    #[test]
    fn accumulation_points_by_residue_class() {
        let w = TailWindow::default();
        let single = accumulation_set(&[PsiSpec::exponential(-0.5), PsiSpec::exponential(-1.0)], 1e-3, None, &w).unwrap();
        assert_eq!(single.accumulation_points, vec![vec![0.5, 1.0]]);
        let alt = PsiSpec::alternating(PsiSpec::exponential(-1.0), PsiSpec::exponential(-3.0));
        let two = accumulation_set(&[alt, PsiSpec::exponential(-2.0)], 1e-3, None, &w).unwrap();
        assert_eq!(two.accumulation_points.len(), 2);
        assert!(two.accumulation_points.contains(&vec![1.0, 2.0]));
        assert!(two.accumulation_points.contains(&vec![3.0, 2.0]));
    }

    #[test]
    fn unbounded_rates_are_rejected() {
        let w = TailWindow::default();
        let r = accumulation_set(&[PsiSpec::stretched(-1.0, 2.0).unwrap()], 1e-3, None, &w);
        assert!(matches!(r, Err(Error::UnboundedRates(_))));
        let values: Vec<f64> = (1..=300).map(|n: i32| (-(n as f64) * (n - 200).max(1) as f64 / 45.0).exp()).collect();
        let r = accumulation_set(&[PsiSpec::table(values).unwrap()], 0.05, None, &w);
        assert!(matches!(r, Err(Error::UnboundedRates(_))), "{r:?}");
    }

    #[test]
    fn sampled_alternation_gives_two_clusters() {
        let values: Vec<f64> = (1..=300)
            .map(|n| if n % 2 == 1 { (-(n as f64)).exp() } else { (-2.0 * n as f64).exp() })
            .collect();
        let r = accumulation_set(&[PsiSpec::table(values).unwrap()], 0.05, None, &TailWindow::default()).unwrap();
        assert_eq!(r.accumulation_points.len(), 2);
        assert!((r.tau - 1.0).abs() < 1e-12);
    }
}
