//! Execution of resolved configurations.

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};

use beta_targets::covering::{cover_annulus, cover_en, cover_hyperboloid, HyperboloidOptions, SamplingPlan};
use beta_targets::dimension::{dim_h_hyperboloid, dim_w, dim_w_diagonalizable, dim_w_single_psi, tau_estimate, FormulaId, TailWindow, DEFAULT_CLUSTER_TOL};
use beta_targets::estimator::{dimension_crosscheck, CrosscheckConfig, CrosscheckKind, ResolutionPlan};
use beta_targets::matrix_torus::{bi_lipschitz_check, commutation_check, sandwich_check_with, verify_conjugation, IntMatrix, SandwichRadii};
use beta_targets::symbolic::enumerate_words;
use beta_targets::targets::{hits_hyperboloid, hits_rectangle};
use beta_targets::{BetaSystem, DiagonalSystem, PsiSpec, TorusPoint, Word};

use crate::config::{CoverParams, EstimateKind, ExperimentConfig, HitMode, Params, Resolutions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// An invariant or coverage check failed.
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: Status,
    /// Full report, including the resolved config and seed.
    pub report: Value,
    /// Tabular output where the command has one.
    pub csv: Option<String>,
}

fn tau_of(tau: Option<f64>, psi: &[PsiSpec], warnings: &mut Vec<String>) -> Result<f64> {
    if let Some(t) = tau {
        return Ok(t);
    }
    let summary = tau_estimate(&psi[0], &TailWindow::default())?;
    warnings.extend(summary.warnings);
    Ok(summary.tau)
}

fn matrix(entries: &[i64]) -> Result<IntMatrix> {
    Ok(IntMatrix::from_flat(entries.to_vec())?)
}

/// Execute a configuration and assemble its report.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut warnings = cfg.warnings.clone();
    let seed = cfg.seed;
    let (status, result, csv): (Status, Value, Option<String>) = match &cfg.params {
        Params::Expand { beta, x, digits } => {
            let sys = BetaSystem::new(*beta)?;
            let e = sys.expand(*x, *digits)?;
            let line = e.word.digits().iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            if e.is_ambiguous() {
                warnings.push(format!("digit extraction near a boundary at positions {:?}", e.ambiguous_at));
            }
            (Status::Pass, serde_json::to_value(&e)?, Some(line + "\n"))
        }
        Params::Cylinders { beta, order, full_only, budget } => {
            let sys = BetaSystem::new(*beta)?;
            let cyls = enumerate_words(&sys, *order, *budget)?;
            let mut csv = String::from("word,left,length,is_full\n");
            let mut full = 0;
            for c in cyls.iter().filter(|c| !full_only || c.is_full()) {
                full += c.is_full() as usize;
                csv.push_str(&format!("{},{:e},{:e},{}\n", c.word, c.left, c.length, c.is_full()));
            }
            let result = json!({
                "beta": beta,
                "order": order,
                "cylinders": cyls.len(),
                "full_cylinders": cyls.iter().filter(|c| c.is_full()).count(),
                "listed": if *full_only { full } else { cyls.len() },
                "total_length": cyls.iter().map(|c| c.length).sum::<f64>(),
            });
            (Status::Pass, result, Some(csv))
        }
        Params::Hits { betas, x, psi, family, horizon, mode } => {
            let sys = DiagonalSystem::new(betas)?;
            let point = TorusPoint::new(x.clone());
            let scan = match mode {
                HitMode::Rect => hits_rectangle(&sys, &point, &family.family, psi, *horizon)?,
                HitMode::Prod => hits_hyperboloid(&sys, &point, &psi[0], *horizon)?,
            };
            let mut csv = String::from("n,kind\n");
            let mut rows: Vec<(usize, &str)> = scan.hits.iter().map(|&n| (n, "hit")).chain(scan.indeterminate.iter().map(|&n| (n, "indeterminate"))).collect();
            rows.sort();
            for (n, kind) in rows {
                csv.push_str(&format!("{n},{kind}\n"));
            }
            (Status::Pass, serde_json::to_value(&scan)?, Some(csv))
        }
        Params::Cover(CoverParams::Annulus { beta, word, delta1, delta2, samples }) => {
            let sys = BetaSystem::new(*beta)?;
            let plan = SamplingPlan {
                stratified: *samples,
                random: 0,
                seed,
            };
            let r = cover_annulus(&sys, &Word::new(word.clone()), *delta1, *delta2, &plan)?;
            (Status::from_bool(r.is_valid()), serde_json::to_value(&r)?, None)
        }
        Params::Cover(CoverParams::Hyperboloid { dim, delta, delta_max, s, samples }) => {
            let opts = HyperboloidOptions {
                delta_max: *delta_max,
                sampling: SamplingPlan {
                    stratified: samples / 2,
                    random: samples - samples / 2,
                    seed,
                },
                keep_pieces: false,
            };
            let r = cover_hyperboloid(*dim, *delta, *s, &opts)?;
            (Status::from_bool(r.is_valid()), serde_json::to_value(&r)?, None)
        }
        Params::Cover(CoverParams::En { betas, n, psi, s, samples, budget }) => {
            let sys = DiagonalSystem::new(betas)?;
            let plan = SamplingPlan {
                stratified: samples / 2,
                random: samples - samples / 2,
                seed,
            };
            let r = cover_en(&sys, *n, psi.value(*n)?, *s, &plan, *budget)?;
            if !r.count_bound_holds {
                warnings.push(format!("largest cell count {} exceeds the stated bound {}", r.max_tuple_count, r.count_bound));
            }
            (Status::from_bool(r.cover.is_valid()), serde_json::to_value(&r)?, None)
        }
        Params::Dimension { formula, betas, tau, psi, matrix: t, p } => {
            let report = match formula {
                FormulaId::SinglePsi => dim_w_single_psi(betas.as_deref().unwrap_or_default(), tau_of(*tau, psi, &mut warnings)?)?,
                FormulaId::Hyperboloid => dim_h_hyperboloid(betas.as_deref().unwrap_or_default(), tau_of(*tau, psi, &mut warnings)?)?,
                FormulaId::Partition => {
                    let b = betas.as_deref().unwrap_or_default();
                    let psis = if psi.len() == 1 { vec![psi[0].clone(); b.len()] } else { psi.clone() };
                    dim_w(b, &psis, DEFAULT_CLUSTER_TOL, &TailWindow::default())?
                }
                FormulaId::Diagonalizable => {
                    let (Some(t), Some(p)) = (t, p) else { bail!("matrix and p are required") };
                    dim_w_diagonalizable(&matrix(t)?, &matrix(p)?, tau_of(*tau, psi, &mut warnings)?)?
                }
            };
            (Status::Pass, serde_json::to_value(&report)?, None)
        }
        Params::Conjugate { matrix: t, p, samples, horizon } => {
            let sys = verify_conjugation(&matrix(t)?, &matrix(p)?)?;
            let comm = commutation_check(&sys, *samples, *horizon, seed)?;
            let lip = bi_lipschitz_check(&sys, *samples, seed);
            let ok = comm.mismatches == 0 && lip.lower_violations == 0 && lip.upper_violations == 0;
            let result = json!({ "system": sys, "commutation": comm, "bi_lipschitz": lip });
            (Status::from_bool(ok), result, None)
        }
        Params::Sandwich { matrix: t, p, psi, family, horizon, samples, mutate } => {
            let sys = verify_conjugation(&matrix(t)?, &matrix(p)?)?;
            let radii = if *mutate { SandwichRadii::corrupted(sys.c1, sys.c2) } else { SandwichRadii::from_constants(sys.c1, sys.c2) };
            let r = sandwich_check_with(&sys, &family.family, psi, *horizon, *samples, seed, radii)?;
            (Status::from_bool(r.violations() == 0), json!({ "mutated": mutate, "report": r }), None)
        }
        Params::Estimate { betas, psi, kind, family, depths, resolutions, budget, tolerance } => {
            let kind = match kind {
                EstimateKind::Hyperboloid => CrosscheckKind::Hyperboloid,
                EstimateKind::Target => CrosscheckKind::Target {
                    family: family.as_ref().map(|f| f.scalar()).unwrap_or(beta_targets::ScalarMap::Identity),
                },
            };
            let mut cc = CrosscheckConfig::new(betas.clone(), psi.clone(), kind, *depths);
            cc.tolerance = *tolerance;
            cc.ball_budget = *budget;
            if let Resolutions::List { values } = resolutions {
                cc.plan = ResolutionPlan::Union { resolutions: values.clone() };
            }
            let r = dimension_crosscheck(&cc)?;
            warnings.extend(r.warnings.iter().cloned());
            (Status::from_bool(r.passed), serde_json::to_value(&r)?, Some(r.csv()))
        }
    };
    let report = json!({
        "command": cfg.command,
        "status": status,
        "seed": seed,
        "config": cfg,
        "result": result,
        "warnings": warnings,
    });
    Ok(RunOutput { status, report, csv })
}
