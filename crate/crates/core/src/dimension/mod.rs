//! Closed-form Hausdorff dimensions of shrinking target sets, and the rate
//! summaries (`τ`, accumulation sets) they are evaluated at.
//!
//! With `L_j = ln β_j` and a rate vector `t`, the contribution of level `i`
//! is
//!
//! ```text
//! λ_i(t) = #Q1 + Σ_{Q2} (1 − t_j/(L_i + t_i)) + Σ_{Q3} L_j/(L_i + t_i)
//! Q1 = {j : L_j > L_i + t_i},  Q2 = {j : L_j + t_j ≤ L_i + t_i},  Q3 = rest.
//! ```
//!
//! Indices in this module are 0-based.

pub mod rates;

use serde::{Deserialize, Serialize};

pub use rates::{accumulation_set, tau_estimate, RateSummary, TailWindow, WindowInfo, DEFAULT_CLUSTER_TOL};

use crate::error::{argument, Result};
use crate::matrix_torus::{verify_conjugation, IntMatrix};
use crate::targets::psi::PsiSpec;

/// Distance at which a partition inequality counts as a tie.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    /// `sup_{t ∈ C(Ψ)} min_i λ_i(t)` for a family of radii.
    Partition,
    /// Closed form for a single radius sequence with rate `τ`.
    SinglePsi,
    /// `d − 1 + L_d/(τ + L_d)` for hyperboloid targets.
    Hyperboloid,
    /// The single-radius closed form on the diagonal of a conjugate `D`.
    Diagonalizable,
}

/// Partition of the axes for one level `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaValue {
    pub index: usize,
    pub value: f64,
    pub q1: Vec<usize>,
    pub q2: Vec<usize>,
    pub q3: Vec<usize>,
    /// Axes `j ≠ i` with an inequality tied within [`BOUNDARY_TOL`].
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub formula: FormulaId,
    pub betas: Vec<f64>,
    #[serde(with = "crate::extreal::option", default)]
    pub tau: Option<f64>,
    pub accumulation_points: Vec<Vec<f64>>,
    pub value: f64,
    /// `λ_i` at the point achieving the supremum.
    pub lambdas: Vec<LambdaValue>,
    /// Levels attaining the minimum, within `1e-12`.
    pub argmin: Vec<usize>,
    pub achieving_point: Option<Vec<f64>>,
    /// The sum over `j > i` in the single-radius closed form uses `ln β_j`.
    pub log_ratio_fix: bool,
    pub boundary_flags: Vec<String>,
    pub warnings: Vec<String>,
    /// Diagonal of `D` when the bases come from a conjugation.
    pub conjugate_diagonal: Option<Vec<i64>>,
}

fn check_betas(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(argument("need at least one base"));
    }
    if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 1.0)) {
        return Err(argument(format!("bases must be real and above 1, got {b}")));
    }
    if betas.windows(2).any(|w| w[0] > w[1]) {
        return Err(argument(format!("bases must be sorted increasingly, got {betas:?}")));
    }
    Ok(())
}

fn check_rates(t: &[f64], d: usize) -> Result<()> {
    if t.len() != d {
        return Err(argument(format!("rate vector has {} entries, expected {d}", t.len())));
    }
    if let Some(v) = t.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(argument(format!("rates must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn lambda_detail(logs: &[f64], t: &[f64], i: usize) -> LambdaValue {
    let level = logs[i] + t[i];
    let (mut q1, mut q2, mut q3, mut boundary) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut value = 0.0;
    for j in 0..logs.len() {
        if j != i && ((logs[j] - level).abs() <= BOUNDARY_TOL || (logs[j] + t[j] - level).abs() <= BOUNDARY_TOL) {
            boundary.push(j);
        }
        if logs[j] > level {
            q1.push(j);
            value += 1.0;
        } else if logs[j] + t[j] <= level {
            q2.push(j);
            value += 1.0 - t[j] / level;
        } else {
            q3.push(j);
            value += logs[j] / level;
        }
    }
    LambdaValue {
        index: i,
        value,
        q1,
        q2,
        q3,
        boundary,
    }
}

/// `λ_i(t)` from the three-way partition of the axes.
pub fn lambda_partition(betas: &[f64], t: &[f64], i: usize) -> Result<f64> {
    Ok(lambda_values(betas, t)?
        .into_iter()
        .nth(i)
        .ok_or_else(|| argument(format!("index {i} out of range for {} axes", betas.len())))?
        .value)
}

/// `λ_i(t)` for every level with its partition.
pub fn lambda_values(betas: &[f64], t: &[f64]) -> Result<Vec<LambdaValue>> {
    check_betas(betas)?;
    check_rates(t, betas.len())?;
    let logs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    Ok((0..betas.len()).map(|i| lambda_detail(&logs, t, i)).collect())
}

fn argmin(values: &[f64]) -> (f64, Vec<usize>) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let idx = values
        .iter()
        .enumerate()
        .filter(|(_, v)| (**v - min).abs() <= 1e-12)
        .map(|(i, _)| i)
        .collect();
    (min, idx)
}

fn boundary_notes(lambdas: &[LambdaValue]) -> Vec<String> {
    lambdas
        .iter()
        .filter(|l| !l.boundary.is_empty())
        .map(|l| format!("level {}: partition ties with axes {:?}", l.index, l.boundary))
        .collect()
}

/// `sup_{t ∈ points} min_i λ_i(t)` over an explicit finite accumulation set.
pub fn dim_w_at(betas: &[f64], points: &[Vec<f64>]) -> Result<DimensionReport> {
    check_betas(betas)?;
    if points.is_empty() {
        return Err(argument("accumulation set is empty"));
    }
    let mut best: Option<(f64, usize, Vec<LambdaValue>)> = None;
    let mut flags = Vec::new();
    for (k, t) in points.iter().enumerate() {
        let lambdas = lambda_values(betas, t)?;
        flags.extend(boundary_notes(&lambdas).into_iter().map(|s| format!("point {k}, {s}")));
        let (min, _) = argmin(&lambdas.iter().map(|l| l.value).collect::<Vec<_>>());
        if best.as_ref().map_or(true, |b| min > b.0) {
            best = Some((min, k, lambdas));
        }
    }
    let (value, k, lambdas) = best.expect("points is nonempty");
    let (_, idx) = argmin(&lambdas.iter().map(|l| l.value).collect::<Vec<_>>());
    Ok(DimensionReport {
        formula: FormulaId::Partition,
        betas: betas.to_vec(),
        tau: None,
        accumulation_points: points.to_vec(),
        value,
        lambdas,
        argmin: idx,
        achieving_point: Some(points[k].clone()),
        log_ratio_fix: false,
        boundary_flags: flags,
        warnings: Vec::new(),
        conjugate_diagonal: None,
    })
}

/// Dimension for a family `(ψ_1, …, ψ_d)` with bounded accumulation set.
pub fn dim_w(betas: &[f64], psis: &[PsiSpec], tol: f64, window: &TailWindow) -> Result<DimensionReport> {
    check_betas(betas)?;
    if psis.len() != betas.len() {
        return Err(argument(format!("{} radius sequences for {} axes", psis.len(), betas.len())));
    }
    let summary = accumulation_set(psis, tol, None, window)?;
    let mut report = dim_w_at(betas, &summary.accumulation_points)?;
    report.warnings = summary.warnings;
    Ok(report)
}

/// Closed form for `ψ_1 = … = ψ_d` with rate `τ ∈ [0, ∞]`.
///
/// Level `i` (1-based `k = i + 1`) contributes
/// `(k L_i − Σ_{L_j > L_i + τ} (L_j − L_i − τ) + Σ_{j > i} L_j) / (τ + L_i)`.
pub fn dim_w_single_psi(betas: &[f64], tau: f64) -> Result<DimensionReport> {
    check_betas(betas)?;
    if !(tau >= 0.0) {
        return Err(argument(format!("τ must be nonnegative, got {tau}")));
    }
    let d = betas.len();
    let logs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let t = vec![if tau.is_finite() { tau } else { 0.0 }; d];
    let mut lambdas: Vec<LambdaValue> = (0..d).map(|i| lambda_detail(&logs, &t, i)).collect();
    let mut flags = Vec::new();
    if tau == f64::INFINITY {
        for l in &mut lambdas {
            l.value = 0.0;
            l.q1.clear();
            l.q3.clear();
            l.q2 = (0..d).collect();
            l.boundary.clear();
        }
    } else if tau == 0.0 {
        for l in &mut lambdas {
            l.value = d as f64;
        }
    } else {
        for (i, l) in lambdas.iter_mut().enumerate() {
            let li = logs[i];
            let excess: f64 = logs.iter().filter(|&&lj| lj > li + tau).map(|&lj| lj - li - tau).sum();
            let above: f64 = logs[i + 1..].iter().sum();
            l.value = ((i + 1) as f64 * li - excess + above) / (tau + li);
        }
        flags = boundary_notes(&lambdas);
    }
    let (value, idx) = argmin(&lambdas.iter().map(|l| l.value).collect::<Vec<_>>());
    Ok(DimensionReport {
        formula: FormulaId::SinglePsi,
        betas: betas.to_vec(),
        tau: Some(tau),
        accumulation_points: if tau.is_finite() { vec![t.clone()] } else { Vec::new() },
        value,
        lambdas,
        argmin: idx,
        achieving_point: tau.is_finite().then_some(t),
        log_ratio_fix: true,
        boundary_flags: flags,
        warnings: Vec::new(),
        conjugate_diagonal: None,
    })
}

/// `d − 1 + L_d/(τ + L_d)` with `L_d` the log of the largest base.
pub fn dim_h_hyperboloid(betas: &[f64], tau: f64) -> Result<DimensionReport> {
    check_betas(betas)?;
    if !(tau >= 0.0) {
        return Err(argument(format!("τ must be nonnegative, got {tau}")));
    }
    let d = betas.len() as f64;
    let ld = betas[betas.len() - 1].ln();
    let value = if tau == f64::INFINITY { d - 1.0 } else { d - 1.0 + ld / (tau + ld) };
    Ok(DimensionReport {
        formula: FormulaId::Hyperboloid,
        betas: betas.to_vec(),
        tau: Some(tau),
        accumulation_points: Vec::new(),
        value,
        lambdas: Vec::new(),
        argmin: Vec::new(),
        achieving_point: None,
        log_ratio_fix: false,
        boundary_flags: Vec::new(),
        warnings: Vec::new(),
        conjugate_diagonal: None,
    })
}

/// The single-radius dimension for `T` conjugate to a diagonal `D` by `P`.
pub fn dim_w_diagonalizable(t: &IntMatrix, p: &IntMatrix, tau: f64) -> Result<DimensionReport> {
    let sys = verify_conjugation(t, p)?;
    let mut report = dim_w_single_psi(&sys.sorted_betas(), tau)?;
    report.formula = FormulaId::Diagonalizable;
    report.conjugate_diagonal = Some(sys.d.diagonal_entries());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn worked_partition_example() {
        let b = [2.0, 4.0];
        let t = [LN2, LN2];
        assert!((lambda_partition(&b, &t, 0).unwrap() - 1.5).abs() < 1e-15);
        assert!((lambda_partition(&b, &t, 1).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let l = lambda_values(&b, &t).unwrap();
        assert_eq!(l[1].q2, vec![0, 1]);
        let r = dim_w(&b, &[PsiSpec::exponential(-LN2), PsiSpec::exponential(-LN2)], 1e-3, &TailWindow::default()).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.argmin, vec![1]);
        assert!(!r.boundary_flags.is_empty());
    }

    #[test]
    fn one_dimensional_and_zero_rate() {
        let v = lambda_partition(&[3.0], &[0.7], 0).unwrap();
        assert!((v - 3f64.ln() / (3f64.ln() + 0.7)).abs() < 1e-15);
        for v in lambda_values(&[1.5, 2.0, 7.0], &[0.0; 3]).unwrap() {
            assert!((v.value - 3.0).abs() < 1e-15);
        }
        assert!(lambda_partition(&[3.0, 2.0], &[0.1, 0.1], 0).is_err());
    }

    #[test]
    fn sup_over_two_points() {
        let b = [2.0, 3.0];
        let pts = vec![vec![0.2, 0.5], vec![1.0, 0.1]];
        let r = dim_w_at(&b, &pts).unwrap();
        let m0 = dim_w_at(&b, &pts[..1]).unwrap().value;
        let m1 = dim_w_at(&b, &pts[1..]).unwrap().value;
        assert_eq!(r.value, m0.max(m1));
    }

    #[test]
    fn single_psi_special_values() {
        let b = [2.0, 2.0, 2.0];
        let r = dim_w_single_psi(&b, 0.4).unwrap();
        assert!((r.value - 3.0 * LN2 / (LN2 + 0.4)).abs() < 1e-14);
        assert_eq!(dim_w_single_psi(&[1.3, 5.0], 0.0).unwrap().value, 2.0);
        assert_eq!(dim_w_single_psi(&[1.3, 5.0], f64::INFINITY).unwrap().value, 0.0);
        assert!(dim_w_single_psi(&[1.3], 0.5).unwrap().log_ratio_fix);
    }

    #[test]
    fn single_psi_matches_partition() {
        let b = [1.5, 2.0, 4.5, 9.0];
        for tau in [0.05, 0.3, 0.8, 1.9, 4.0] {
            let a = dim_w_single_psi(&b, tau).unwrap();
            let p = dim_w_at(&b, &[vec![tau; 4]]).unwrap();
            assert!((a.value - p.value).abs() < 1e-12, "τ = {tau}");
            for (x, y) in a.lambdas.iter().zip(&p.lambdas) {
                assert!((x.value - y.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperboloid_values() {
        assert_eq!(dim_h_hyperboloid(&[2.0, 2.0], 0.0).unwrap().value, 2.0);
        assert!((dim_h_hyperboloid(&[2.0, 2.0], LN2).unwrap().value - 1.5).abs() < 1e-15);
        let one = dim_h_hyperboloid(&[3.0], 0.9).unwrap().value;
        assert!((one - dim_w_single_psi(&[3.0], 0.9).unwrap().value).abs() < 1e-15);
    }

    #[test]
    fn diagonalizable_example() {
        let t = IntMatrix::from_flat(vec![3, 1, 0, 2]).unwrap();
        let p = IntMatrix::from_flat(vec![1, 1, 0, -1]).unwrap();
        let r = dim_w_diagonalizable(&t, &p, 0.5).unwrap();
        assert_eq!(r.betas, vec![2.0, 3.0]);
        assert_eq!(r.value, dim_w_single_psi(&[2.0, 3.0], 0.5).unwrap().value);
        assert_eq!(r.formula, FormulaId::Diagonalizable);
        let diag = IntMatrix::diagonal(&[2, 5]);
        let same = dim_w_diagonalizable(&diag, &IntMatrix::identity(2), 0.5).unwrap();
        assert_eq!(same.value, dim_w_single_psi(&[2.0, 5.0], 0.5).unwrap().value);
        let cat = IntMatrix::from_flat(vec![2, 1, 1, 1]).unwrap();
        assert!(dim_w_diagonalizable(&cat, &IntMatrix::identity(2), 0.5).is_err());
    }

    #[test]
    fn report_serializes_infinite_tau() {
        let r = dim_w_single_psi(&[2.0], f64::INFINITY).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"tau\":\"inf\""));
        let back: DimensionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.tau, Some(f64::INFINITY));
    }
}
