//! Integer matrix endomorphisms `x ↦ Tx mod 1` of `𝕋^d`, their conjugation
//! to diagonal form by a unimodular `P`, and finite-depth checks of the
//! sandwich between the target sets of `T` and of `D = P T P^{-1}`.

mod matrix;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use matrix::{integer_roots, IntMatrix};

use crate::error::{argument, Error, Result};
use crate::targets::family::LipschitzFamily;
use crate::targets::psi::PsiSpec;
use crate::targets::torus::{reduce, torus_distance, TorusPoint};

/// `T` with a verified conjugation `P T P^{-1} = D`, `D` diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSystem {
    pub t: IntMatrix,
    pub p: IntMatrix,
    pub p_inverse: IntMatrix,
    pub d: IntMatrix,
    /// Eigenvalues of `T` from its characteristic polynomial.
    pub eigenvalues: Vec<i64>,
    /// Smallest and largest singular values of `P`.
    pub c1: f64,
    pub c2: f64,
    /// Pair distance below which the bi-Lipschitz check samples, `1/(2‖P‖)`.
    pub lipschitz_cutoff: f64,
}

impl MatrixSystem {
    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// Diagonal of `D` in increasing order, the bases of the conjugate system.
    pub fn sorted_betas(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.d.diagonal_entries().into_iter().map(|v| v as f64).collect();
        b.sort_by(f64::total_cmp);
        b
    }

    /// `φ(x) = P x mod 1`.
    pub fn phi(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.p, x)
    }

    pub fn phi_inverse(&self, y: &[f64]) -> Vec<f64> {
        mat_vec(&self.p_inverse, y)
    }
}

fn mat_vec(m: &IntMatrix, x: &[f64]) -> Vec<f64> {
    let n = m.dim();
    (0..n)
        .map(|i| reduce((0..n).map(|j| m.get(i, j) as f64 * x[j]).sum::<f64>()))
        .collect()
}

/// The integer eigenvalues of `T`, or a conjugation error when the
/// characteristic polynomial has a non-integer root.
pub fn integer_eigenvalues(t: &IntMatrix) -> Result<Vec<i64>> {
    let roots = integer_roots(&t.characteristic_polynomial())
        .ok_or_else(|| Error::Conjugation(format!("characteristic polynomial of {t} has non-integer roots")))?;
    roots
        .into_iter()
        .map(|r| i64::try_from(r).map_err(|_| Error::Conjugation("eigenvalue overflows i64".into())))
        .collect()
}

fn singular_values(p: &IntMatrix) -> (f64, f64) {
    let n = p.dim();
    let m = DMatrix::from_row_slice(n, n, &p.entries().iter().map(|&v| v as f64).collect::<Vec<_>>());
    let sv = m.singular_values();
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    (lo, hi)
}

/// Check that `P` is unimodular and `P T P^{-1}` is a diagonal integer
/// matrix with every entry above 1.
pub fn verify_conjugation(t: &IntMatrix, p: &IntMatrix) -> Result<MatrixSystem> {
    if t.dim() != p.dim() {
        return Err(argument(format!("T is {0}×{0} but P is {1}×{1}", t.dim(), p.dim())));
    }
    if t.det() == 0 {
        return Err(Error::Conjugation(format!("T = {t} is singular")));
    }
    let eigenvalues = integer_eigenvalues(t)?;
    let det_p = p.det();
    if det_p.abs() != 1 {
        return Err(Error::Conjugation(format!("P = {p} has determinant {det_p}, not ±1")));
    }
    let p_inverse = p.unimodular_inverse()?;
    let d = p.mul(t)?.mul(&p_inverse)?;
    if !d.is_diagonal() {
        return Err(Error::Conjugation(format!("P T P^-1 = {d} is not diagonal")));
    }
    let diag = d.diagonal_entries();
    if let Some(v) = diag.iter().find(|&&v| v <= 1) {
        return Err(Error::Conjugation(format!("diagonal entry {v} of D is not above 1")));
    }
    let (c1, c2) = singular_values(p);
    Ok(MatrixSystem {
        t: t.clone(),
        p: p.clone(),
        p_inverse,
        d,
        eigenvalues,
        c1,
        c2,
        lipschitz_cutoff: 1.0 / (2.0 * c2),
    })
}

/// `T^n x mod 1` in floating point.
pub fn apply_matrix(m: &IntMatrix, x: &TorusPoint, n: usize) -> Result<TorusPoint> {
    if x.dim() != m.dim() {
        return Err(argument(format!("point has dimension {}, matrix {}", x.dim(), m.dim())));
    }
    let mut y = x.coords().to_vec();
    for _ in 0..n {
        y = mat_vec(m, &y);
    }
    Ok(TorusPoint::new(y))
}

/// A point of `(ℚ/ℤ)^d` with common denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    pub num: Vec<i128>,
    pub den: i128,
}

impl RationalPoint {
    pub fn new(num: Vec<i128>, den: i128) -> Result<Self> {
        if den <= 0 {
            return Err(argument("denominator must be positive"));
        }
        Ok(Self {
            num: num.into_iter().map(|v| v.rem_euclid(den)).collect(),
            den,
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.num.iter().map(|&v| v as f64 / self.den as f64).collect()
    }
}

/// `M^n x mod 1` in exact arithmetic.
pub fn apply_matrix_exact(m: &IntMatrix, x: &RationalPoint, n: usize) -> Result<RationalPoint> {
    let d = m.dim();
    if x.num.len() != d {
        return Err(argument(format!("point has dimension {}, matrix {d}", x.num.len())));
    }
    let mut v = x.num.clone();
    for _ in 0..n {
        v = (0..d)
            .map(|i| {
                (0..d)
                    .try_fold(0i128, |acc, j| acc.checked_add((m.get(i, j) as i128).checked_mul(v[j])?))
                    .map(|s| s.rem_euclid(x.den))
                    .ok_or_else(|| argument("rational orbit overflows i128"))
            })
            .collect::<Result<_>>()?;
    }
    Ok(RationalPoint { num: v, den: x.den })
}

/// Large prime denominator for sampled rational points.
pub const SAMPLE_DENOMINATOR: i128 = 2_147_483_647;

fn rational_samples(d: usize, count: usize, seed: u64) -> Vec<RationalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| RationalPoint {
            num: (0..d).map(|_| rng.gen_range(0..SAMPLE_DENOMINATOR)).collect(),
            den: SAMPLE_DENOMINATOR,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub samples: usize,
    pub horizon: usize,
    pub checks: u64,
    pub mismatches: u64,
}

/// `φ(T^n x) = D^n φ(x)` exactly on rational sample points, `n ≤ horizon`.
pub fn commutation_check(sys: &MatrixSystem, samples: usize, horizon: usize, seed: u64) -> Result<CommutationReport> {
    let pts = rational_samples(sys.dim(), samples, seed);
    let per_point = pts
        .par_iter()
        .map(|x| -> Result<(u64, u64)> {
            let (mut checks, mut bad) = (0, 0);
            let mut tx = x.clone();
            let mut dy = apply_matrix_exact(&sys.p, x, 1)?;
            for _ in 1..=horizon {
                tx = apply_matrix_exact(&sys.t, &tx, 1)?;
                dy = apply_matrix_exact(&sys.d, &dy, 1)?;
                checks += 1;
                if apply_matrix_exact(&sys.p, &tx, 1)? != dy {
                    bad += 1;
                }
            }
            Ok((checks, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutationReport {
        samples,
        horizon,
        checks: per_point.iter().map(|p| p.0).sum(),
        mismatches: per_point.iter().map(|p| p.1).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitzReport {
    pub c1: f64,
    pub c2: f64,
    pub cutoff: f64,
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower_violations: usize,
    pub upper_violations: usize,
}

/// `c1 |x − y| ≤ |φ(x) − φ(y)| ≤ c2 |x − y|` in the torus metric on pairs
/// with `|x − y| < cutoff`.
pub fn bi_lipschitz_check(sys: &MatrixSystem, pairs: usize, seed: u64) -> BiLipschitzReport {
    let d = sys.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r0 = sys.lipschitz_cutoff;
    let mut report = BiLipschitzReport {
        c1: sys.c1,
        c2: sys.c2,
        cutoff: r0,
        pairs,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        lower_violations: 0,
        upper_violations: 0,
    };
    for _ in 0..pairs {
        let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let dir: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        let r = r0 * rng.gen::<f64>().max(1e-6);
        let y: Vec<f64> = x.iter().zip(&dir).map(|(a, v)| reduce(a + r * v / norm)).collect();
        let dx = torus_distance(&x, &y);
        if dx == 0.0 {
            continue;
        }
        let ratio = torus_distance(&sys.phi(&x), &sys.phi(&y)) / dx;
        report.min_ratio = report.min_ratio.min(ratio);
        report.max_ratio = report.max_ratio.max(ratio);
        if ratio < sys.c1 * (1.0 - 1e-9) {
            report.lower_violations += 1;
        }
        if ratio > sys.c2 * (1.0 + 1e-9) {
            report.upper_violations += 1;
        }
    }
    report
}

/// Radius multipliers of `ψ(n)` for the three sets in the sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRadii {
    /// `S`: `|T^n x − f_n(φ x)| < k ψ(n)`.
    pub s: f64,
    /// `S₁`: `|D^n y − φ(f_n y)| ≤ k ψ(n)`.
    pub s1: f64,
    /// `S₂`: `|D^n y − φ(f_n y)| ≤ k ψ(n)`.
    pub s2: f64,
}

impl SandwichRadii {
    /// `c2/c1`, `c2²/c1` and `c2²/c2`.
    pub fn from_constants(c1: f64, c2: f64) -> Self {
        Self {
            s: c2 / c1,
            s1: c2 * c2 / c1,
            s2: c2,
        }
    }

    /// The `S₁` constant replaced by `c2²/(2c1)`, for harness mutation tests.
    pub fn corrupted(c1: f64, c2: f64) -> Self {
        Self {
            s1: c2 * c2 / (2.0 * c1),
            ..Self::from_constants(c1, c2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub horizon: usize,
    pub radii: SandwichRadii,
    pub checks: u64,
    pub in_s2: u64,
    pub in_s: u64,
    pub in_s1: u64,
    /// Points meeting the `S₂` condition at time `n` but not the `S` one.
    pub s2_not_s: u64,
    /// Points meeting the `S` condition at time `n` but not the `S₁` one.
    pub s_not_s1: u64,
}

impl SandwichReport {
    pub fn violations(&self) -> u64 {
        self.s2_not_s + self.s_not_s1
    }
}

/// Finite-depth sandwich check with the verified constants.
pub fn sandwich_check(sys: &MatrixSystem, family: &LipschitzFamily, psi: &PsiSpec, horizon: usize, samples: usize, seed: u64) -> Result<SandwichReport> {
    sandwich_check_with(sys, family, psi, horizon, samples, seed, SandwichRadii::from_constants(sys.c1, sys.c2))
}

/// For sampled `y = φ(x)` and `n ≤ horizon`, check that the `S₂` condition
/// implies the `S` condition, which implies the `S₁` condition. Orbits are
/// exact; distances and targets are evaluated in floating point.
pub fn sandwich_check_with(
    sys: &MatrixSystem,
    family: &LipschitzFamily,
    psi: &PsiSpec,
    horizon: usize,
    samples: usize,
    seed: u64,
    radii: SandwichRadii,
) -> Result<SandwichReport> {
    let d = sys.dim();
    if family.dim() != d {
        return Err(argument(format!("family has dimension {}, torus {d}", family.dim())));
    }
    psi.check_horizon(horizon)?;
    let radius: Vec<f64> = (1..=horizon).map(|n| psi.value(n)).collect::<Result<_>>()?;
    let pts = rational_samples(d, samples, seed);
    let counts = pts
        .par_iter()
        .map(|x| -> Result<[u64; 6]> {
            let mut c = [0u64; 6];
            let y = apply_matrix_exact(&sys.p, x, 1)?;
            let yf = y.to_f64();
            let mut tx = x.clone();
            let mut dy = y.clone();
            for n in 1..=horizon {
                tx = apply_matrix_exact(&sys.t, &tx, 1)?;
                dy = apply_matrix_exact(&sys.d, &dy, 1)?;
                let target = family.apply(n, &yf);
                let gap_t = torus_distance(&tx.to_f64(), &target);
                let gap_d = torus_distance(&dy.to_f64(), &sys.phi(&target));
                let r = radius[n - 1];
                let slack = 1e-9 * r;
                let in_s2 = gap_d <= radii.s2 * r;
                let in_s = gap_t < radii.s * r;
                let in_s1 = gap_d <= radii.s1 * r;
                c[0] += 1;
                c[1] += u64::from(in_s2);
                c[2] += u64::from(in_s);
                c[3] += u64::from(in_s1);
                if in_s2 && gap_t >= radii.s * r + slack {
                    c[4] += 1;
                }
                if in_s && gap_d > radii.s1 * r + slack {
                    c[5] += 1;
                }
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = |k: usize| counts.iter().map(|c| c[k]).sum::<u64>();
    Ok(SandwichReport {
        samples,
        horizon,
        radii,
        checks: sum(0),
        in_s2: sum(1),
        in_s: sum(2),
        in_s1: sum(3),
        s2_not_s: sum(4),
        s_not_s1: sum(5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> MatrixSystem {
        let t = IntMatrix::from_flat(vec![3, 1, 0, 2]).unwrap();
        let p = IntMatrix::from_flat(vec![1, 1, 0, -1]).unwrap();
        verify_conjugation(&t, &p).unwrap()
    }

    #[test]
    fn upper_triangular_example_conjugates_to_diagonal() {
        let sys = example();
        assert_eq!(sys.d, IntMatrix::diagonal(&[3, 2]));
        assert_eq!(sys.eigenvalues, vec![2, 3]);
        assert_eq!(sys.sorted_betas(), vec![2.0, 3.0]);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sys.c1 - 1.0 / golden).abs() < 1e-12);
        assert!((sys.c2 - golden).abs() < 1e-12);
    }

    #[test]
    fn trivial_conjugation() {
        let t = IntMatrix::diagonal(&[2, 3]);
        let sys = verify_conjugation(&t, &IntMatrix::identity(2)).unwrap();
        assert_eq!(sys.d, t);
        assert!((sys.c1 - 1.0).abs() < 1e-15 && (sys.c2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugation_failures() {
        let id = IntMatrix::identity(2);
        let cat = IntMatrix::from_flat(vec![2, 1, 1, 1]).unwrap();
        assert!(matches!(verify_conjugation(&cat, &id), Err(Error::Conjugation(_))));
        let t = IntMatrix::from_flat(vec![3, 1, 0, 2]).unwrap();
        assert!(matches!(verify_conjugation(&t, &id), Err(Error::Conjugation(_))));
        let doubled = IntMatrix::from_flat(vec![2, 0, 0, 1]).unwrap();
        assert!(matches!(verify_conjugation(&t, &doubled), Err(Error::Conjugation(_))));
        let small = IntMatrix::diagonal(&[1, 3]);
        assert!(matches!(verify_conjugation(&small, &id), Err(Error::Conjugation(_))));
    }

    #[test]
    fn exact_orbits() {
        let d = IntMatrix::diagonal(&[2, 3]);
        let x = RationalPoint::new(vec![3, 2], 6).unwrap();
        assert_eq!(apply_matrix_exact(&d, &x, 1).unwrap().num, vec![0, 0]);
        assert_eq!(apply_matrix_exact(&d, &x, 0).unwrap(), x);
        let f = apply_matrix(&d, &TorusPoint::new(vec![0.5, 1.0 / 3.0]), 1).unwrap();
        assert!(f.coords().iter().all(|&v| v < 1e-15 || v > 1.0 - 1e-15));
        let id = IntMatrix::identity(2);
        let p = TorusPoint::new(vec![0.3, 0.7]);
        assert_eq!(apply_matrix(&id, &p, 5).unwrap(), p);
    }

    #[test]
    fn conjugacy_commutes_exactly() {
        let r = commutation_check(&example(), 500, 20, 1).unwrap();
        assert_eq!(r.checks, 10_000);
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn bi_lipschitz_holds_below_cutoff() {
        let r = bi_lipschitz_check(&example(), 5000, 3);
        assert_eq!(r.lower_violations + r.upper_violations, 0, "{r:?}");
    }

    #[test]
    fn sandwich_and_mutation() {
        let sys = example();
        let f = LipschitzFamily::parse("const:0.3,0.6", 2).unwrap();
        let psi = PsiSpec::constant(0.05).unwrap();
        let ok = sandwich_check(&sys, &f, &psi, 20, 2000, 5).unwrap();
        assert_eq!(ok.violations(), 0, "{ok:?}");
        assert!(ok.in_s2 > 0 && ok.in_s > ok.in_s2);
        let bad = sandwich_check_with(&sys, &f, &psi, 20, 2000, 5, SandwichRadii::corrupted(sys.c1, sys.c2)).unwrap();
        assert!(bad.s_not_s1 > 0, "{bad:?}");
    }

    #[test]
    fn diagonal_identity_sets_coincide() {
        let sys = verify_conjugation(&IntMatrix::diagonal(&[2, 3]), &IntMatrix::identity(2)).unwrap();
        let f = LipschitzFamily::parse("identity", 2).unwrap();
        let r = sandwich_check(&sys, &f, &PsiSpec::constant(0.1).unwrap(), 10, 500, 2).unwrap();
        assert_eq!(r.violations(), 0);
        assert_eq!(r.in_s2, r.in_s1);
    }
}
