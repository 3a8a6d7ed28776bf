//! Box-counting slopes of the ball families behind the lower bounds,
//! compared with the closed-form dimensions.
//!
//! At depth `n` the construction places one ball of diameter
//! `ε_n = ψ(n)β^{-n}/4` in every full cylinder of order `n`. The default
//! plan counts the depth-`n` family at its own scale `ε_n` and regresses
//! `ln N_n` on `ln(1/ε_n)`; the alternative counts the union of all depths
//! at a fixed list of resolutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boxcount::{box_count, cantor_fixture, checked_resolutions, geometric_resolutions, unit_square_fixture, BoxCountResult, BoxSet, IntervalUnion};
use crate::beta::BetaSystem;
use crate::covering::ball_construction;
use crate::dimension::rates::{tau_estimate, TailWindow};
use crate::dimension::{dim_h_hyperboloid, dim_w_single_psi, FormulaId};
use crate::error::{argument, Error, Result};
use crate::symbolic::{count_upper_bound, full_cylinders};
use crate::targets::family::ScalarMap;
use crate::targets::psi::PsiSpec;

pub const DEFAULT_TOLERANCE: f64 = 0.15;
pub const CALIBRATION_TOLERANCE: f64 = 0.05;
/// Default cap on the number of balls built over the whole depth range.
pub const DEFAULT_BALL_BUDGET: u64 = 1 << 22;

/// The balls of one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallLevel {
    pub n: usize,
    pub psi: f64,
    pub radius: f64,
    pub cylinders: usize,
    /// Full cylinders where no target point exists.
    pub skipped: usize,
    pub balls: IntervalUnion,
}

/// One ball `B(x, ψβ^{-n}/8)` per full cylinder of order `n` with
/// `‖T^n x − f_n(x)‖ < ψ/2`.
pub fn target_balls(sys: &BetaSystem, n: usize, f: &ScalarMap, psi: f64, budget: u64) -> Result<BallLevel> {
    let cylinders = full_cylinders(sys, n, budget)?;
    let built: Vec<Option<(f64, f64)>> = cylinders
        .par_iter()
        .map(|c| match ball_construction(sys, &c.word, f, psi) {
            Ok(ball) => Ok(Some(ball.interval())),
            Err(Error::Construction(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let skipped = built.iter().filter(|b| b.is_none()).count();
    Ok(BallLevel {
        n,
        psi,
        radius: psi * sys.full_length(n) / 8.0,
        cylinders: cylinders.len(),
        skipped,
        balls: IntervalUnion::new(built.into_iter().flatten().collect())?,
    })
}

/// Balls for the recurrence target `f_n = id`.
pub fn recurrence_balls(sys: &BetaSystem, n: usize, psi: f64, budget: u64) -> Result<BallLevel> {
    target_balls(sys, n, &ScalarMap::Identity, psi, budget)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrosscheckKind {
    /// `d = 1`, moving target `f_n`.
    Target { family: ScalarMap },
    /// `d ∈ {1, 2}`: `[0,1)^{d−1}` times the recurrence balls of the
    /// largest base.
    Hyperboloid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "plan", rename_all = "snake_case")]
pub enum ResolutionPlan {
    /// Each depth counted at its own ball diameter.
    Levels,
    /// The union over all depths counted at the given resolutions.
    Union { resolutions: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckConfig {
    pub betas: Vec<f64>,
    pub psi: PsiSpec,
    pub kind: CrosscheckKind,
    /// Inclusive depth range `[N1, N2]`.
    pub depths: (usize, usize),
    pub plan: ResolutionPlan,
    pub tolerance: f64,
    pub ball_budget: u64,
}

impl CrosscheckConfig {
    pub fn new(betas: Vec<f64>, psi: PsiSpec, kind: CrosscheckKind, depths: (usize, usize)) -> Self {
        Self {
            betas,
            psi,
            kind,
            depths,
            plan: ResolutionPlan::Levels,
            tolerance: DEFAULT_TOLERANCE,
            ball_budget: DEFAULT_BALL_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub square: BoxCountResult,
    pub cantor: BoxCountResult,
    pub cantor_expected: f64,
    pub tolerance: f64,
    pub square_passed: bool,
    pub cantor_passed: bool,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.square_passed && self.cantor_passed
    }
}

/// Unit square at `2^{-1..-8}` and the depth-10 Cantor stage at `3^{-1..-10}`.
pub fn calibrate() -> Result<CalibrationReport> {
    let square = box_count(&unit_square_fixture(), &geometric_resolutions(2.0, 1..=8))?;
    let cantor = box_count(&cantor_fixture(10), &geometric_resolutions(3.0, 1..=10))?;
    let cantor_expected = 2f64.ln() / 3f64.ln();
    Ok(CalibrationReport {
        square_passed: (square.slope - 2.0).abs() <= CALIBRATION_TOLERANCE,
        cantor_passed: (cantor.slope - cantor_expected).abs() <= CALIBRATION_TOLERANCE,
        square,
        cantor,
        cantor_expected,
        tolerance: CALIBRATION_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n: usize,
    pub psi: f64,
    pub epsilon: f64,
    pub balls: usize,
    pub skipped: usize,
    /// `N(ε_n)` of the depth-`n` set; absent under the union plan.
    pub count: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub config: CrosscheckConfig,
    pub formula: FormulaId,
    #[serde(with = "crate::extreal")]
    pub tau: f64,
    pub theory: f64,
    pub slope: f64,
    pub stderr: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub calibration: CalibrationReport,
    pub box_count: BoxCountResult,
    pub levels: Vec<LevelSummary>,
    pub warnings: Vec<String>,
}

impl CrosscheckReport {
    /// `(ε, N(ε))` rows.
    pub fn csv(&self) -> String {
        let mut out = String::from("epsilon,count\n");
        for (e, n) in self.box_count.resolutions.iter().zip(&self.box_count.counts) {
            out.push_str(&format!("{e:e},{n}\n"));
        }
        out
    }
}

/// Box-count slope of the finite-depth ball skeleton against the closed
/// form. The calibration fixtures run first and must pass.
pub fn dimension_crosscheck(cfg: &CrosscheckConfig) -> Result<CrosscheckReport> {
    let d = cfg.betas.len();
    if d == 0 || d > 2 {
        return Err(argument(format!("crosscheck supports d = 1 or 2, got {d}")));
    }
    if matches!(cfg.kind, CrosscheckKind::Target { .. }) && d != 1 {
        return Err(argument("moving-target crosscheck supports d = 1 only"));
    }
    let (n1, n2) = cfg.depths;
    if n1 == 0 || n2 < n1 + 3 {
        return Err(argument(format!("depth range {n1}:{n2} must start at 1 or above and contain at least 4 depths")));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(argument("tolerance must be positive"));
    }
    let calibration = calibrate()?;
    if !calibration.passed() {
        return Err(Error::Estimation(format!(
            "calibration failed: square slope {}, Cantor slope {}",
            calibration.square.slope, calibration.cantor.slope
        )));
    }

    let rates = tau_estimate(&cfg.psi, &TailWindow::default())?;
    let tau = rates.tau;
    let mut warnings = rates.warnings.clone();
    let (formula, theory) = match cfg.kind {
        CrosscheckKind::Target { .. } => (FormulaId::SinglePsi, dim_w_single_psi(&cfg.betas, tau)?.value),
        CrosscheckKind::Hyperboloid => (FormulaId::Hyperboloid, dim_h_hyperboloid(&cfg.betas, tau)?.value),
    };

    let sys = BetaSystem::new(cfg.betas[d - 1])?;
    let planned: f64 = (n1..=n2).map(|n| count_upper_bound(&sys, n)).sum();
    if planned > cfg.ball_budget as f64 {
        return Err(Error::Budget {
            estimate: planned,
            budget: cfg.ball_budget,
        });
    }
    let family = match &cfg.kind {
        CrosscheckKind::Target { family } => family.clone(),
        CrosscheckKind::Hyperboloid => ScalarMap::Identity,
    };
    let mut levels = Vec::new();
    let mut sets = Vec::new();
    for n in n1..=n2 {
        let psi = cfg.psi.value(n)?;
        if !(psi > 0.0 && psi < 2.0) {
            return Err(argument(format!("ψ({n}) = {psi} is outside (0, 2)")));
        }
        let level = target_balls(&sys, n, &family, psi, cfg.ball_budget)?;
        if level.balls.is_empty() {
            return Err(Error::Estimation(format!("no balls could be built at depth {n}")));
        }
        if level.skipped > 0 {
            warnings.push(format!("depth {n}: {} of {} full cylinders have no target point", level.skipped, level.cylinders));
        }
        levels.push(LevelSummary {
            n,
            psi,
            epsilon: 2.0 * level.radius,
            balls: level.balls.len(),
            skipped: level.skipped,
            count: None,
        });
        sets.push(level.balls);
    }
    let wrap = |balls: IntervalUnion| -> BoxSet {
        if d == 1 {
            BoxSet::Intervals(balls)
        } else {
            BoxSet::Product(vec![IntervalUnion::unit(), balls])
        }
    };

    let result = match &cfg.plan {
        ResolutionPlan::Levels => {
            let mut pairs: Vec<(f64, f64)> = sets
                .into_iter()
                .zip(levels.iter_mut())
                .map(|(balls, level)| {
                    let count = wrap(balls).count(level.epsilon);
                    level.count = Some(count);
                    (level.epsilon, count)
                })
                .collect();
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
            let eps: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            checked_resolutions(&eps)?;
            BoxCountResult::from_counts(d, eps, pairs.into_iter().map(|p| p.1).collect())?
        }
        ResolutionPlan::Union { resolutions } => {
            let all: Vec<(f64, f64)> = sets.iter().flat_map(|u| u.intervals().iter().copied()).collect();
            box_count(&wrap(IntervalUnion::new(all)?), resolutions)?
        }
    };
    if !result.slope_in_range() {
        warnings.push(format!("slope {} lies outside [0, {d}] by more than 3 standard errors", result.slope));
    }
    let gap = (result.slope - theory).abs();
    Ok(CrosscheckReport {
        config: cfg.clone(),
        formula,
        tau,
        theory,
        slope: result.slope,
        stderr: result.stderr,
        gap,
        tolerance: cfg.tolerance,
        passed: gap <= cfg.tolerance,
        calibration,
        box_count: result,
        levels,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn recurrence_balls_sit_on_periodic_points() {
        let sys = BetaSystem::new(2.0).unwrap();
        let level = recurrence_balls(&sys, 4, 0.25, 1 << 10).unwrap();
        assert_eq!(level.cylinders, 16);
        // The branch through 1111 has its fixed point at 1, outside [0, 1).
        assert_eq!(level.skipped, 1);
        assert_eq!(level.balls.len(), 15);
        for &(a, b) in level.balls.intervals() {
            assert!((b - a - 0.25 / 16.0 / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn recurrence_slope_is_one_half() {
        let cfg = CrosscheckConfig::new(vec![2.0], PsiSpec::exponential(-LN_2), CrosscheckKind::Hyperboloid, (6, 12));
        let r = dimension_crosscheck(&cfg).unwrap();
        assert!((r.theory - 0.5).abs() < 1e-12);
        assert!(r.passed, "slope {} gap {}", r.slope, r.gap);
        assert!(r.calibration.passed());
        assert_eq!(r.levels.len(), 7);
    }

    #[test]
    fn moving_target_slope() {
        let family = ScalarMap::Constant { point: 0.3 };
        let cfg = CrosscheckConfig::new(vec![2.0], PsiSpec::exponential(-LN_2), CrosscheckKind::Target { family }, (6, 12));
        let r = dimension_crosscheck(&cfg).unwrap();
        assert!(r.passed, "slope {} gap {}", r.slope, r.gap);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }

    #[test]
    fn slow_decay_gives_full_dimension() {
        let cfg = CrosscheckConfig {
            tolerance: 0.1,
            ..CrosscheckConfig::new(vec![2.0], PsiSpec::power(-1.0), CrosscheckKind::Hyperboloid, (14, 20))
        };
        let r = dimension_crosscheck(&cfg).unwrap();
        assert_eq!(r.theory, 1.0);
        assert!(r.passed, "slope {} gap {}", r.slope, r.gap);
    }

    #[test]
    fn planar_hyperboloid_slope() {
        let cfg = CrosscheckConfig {
            tolerance: 0.2,
            ..CrosscheckConfig::new(vec![2.0, 2.0], PsiSpec::exponential(-LN_2), CrosscheckKind::Hyperboloid, (6, 12))
        };
        let r = dimension_crosscheck(&cfg).unwrap();
        assert!((r.theory - 1.5).abs() < 1e-12);
        assert!(r.passed, "slope {} gap {}", r.slope, r.gap);
    }

    #[test]
    fn union_plan_and_errors() {
        let mut cfg = CrosscheckConfig::new(vec![2.0], PsiSpec::exponential(-LN_2), CrosscheckKind::Hyperboloid, (4, 8));
        cfg.plan = ResolutionPlan::Union {
            resolutions: geometric_resolutions(2.0, 4..=8),
        };
        let r = dimension_crosscheck(&cfg).unwrap();
        assert_eq!(r.box_count.resolutions.len(), 5);
        assert!(r.levels.iter().all(|l| l.count.is_none()));
        assert!(r.csv().starts_with("epsilon,count\n"));

        let mut big = cfg.clone();
        big.depths = (20, 24);
        big.ball_budget = 1 << 20;
        assert!(matches!(dimension_crosscheck(&big), Err(Error::Budget { .. })));
        let mut short = cfg.clone();
        short.depths = (4, 6);
        assert!(dimension_crosscheck(&short).is_err());
        let three = CrosscheckConfig::new(vec![2.0, 2.0, 2.0], PsiSpec::exponential(-LN_2), CrosscheckKind::Hyperboloid, (4, 8));
        assert!(dimension_crosscheck(&three).is_err());
    }
}
