//! Torus geometry, shrinking target families and hit detection for diagonal
//! systems `T = diag(β_1, …, β_d)`.

pub mod family;
pub mod jset;
pub mod psi;
pub mod torus;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beta::BetaSystem;
use crate::error::{argument, Result};

pub use family::{CustomMap, LipschitzFamily, ScalarMap};
pub use jset::{j_set, j_set_bound_applies, JSet};
pub use psi::PsiSpec;
pub use torus::{circle_distance, reduce, torus_distance, TorusPoint};

/// Relative guard for strict inequalities in hit tests. A comparison whose
/// sides agree to this relative precision is reported as indeterminate.
pub const HIT_GUARD: f64 = 1e-12;

/// A diagonal torus endomorphism, one beta-transformation per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSystem {
    axes: Vec<BetaSystem>,
}

impl DiagonalSystem {
    pub fn new(betas: &[f64]) -> Result<Self> {
        if betas.is_empty() {
            return Err(argument("need at least one base"));
        }
        Ok(Self {
            axes: betas.iter().map(|&b| BetaSystem::new(b)).collect::<Result<_>>()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, i: usize) -> &BetaSystem {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[BetaSystem] {
        &self.axes
    }

    pub fn betas(&self) -> Vec<f64> {
        self.axes.iter().map(BetaSystem::beta).collect()
    }

    /// Bases in nondecreasing order.
    pub fn is_sorted(&self) -> bool {
        self.axes.windows(2).all(|w| w[0].beta() <= w[1].beta())
    }

    /// One application of `T` to a point of `[0,1)^d`.
    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        self.axes.iter().zip(x).map(|(s, &xi)| s.step(xi)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    Inside,
    Outside,
    Boundary,
}

fn strictly_below(lhs: f64, rhs: f64) -> Decision {
    if (lhs - rhs).abs() <= HIT_GUARD * rhs.abs().max(lhs.abs()) {
        Decision::Boundary
    } else if lhs < rhs {
        Decision::Inside
    } else {
        Decision::Outside
    }
}

/// Times `n ≤ horizon` at which the orbit meets the target.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HitScan {
    pub hits: Vec<usize>,
    /// Times where some comparison fell inside [`HIT_GUARD`].
    pub indeterminate: Vec<usize>,
}

fn check_point(sys: &DiagonalSystem, x: &TorusPoint) -> Result<()> {
    if x.dim() != sys.dim() {
        return Err(argument(format!("point has dimension {}, system has {}", x.dim(), sys.dim())));
    }
    Ok(())
}

/// Times with `|T_{β_i}^n x_i − f_n^{(i)}(x_i)| < ψ_i(n)` for every axis.
pub fn hits_rectangle(sys: &DiagonalSystem, x: &TorusPoint, family: &LipschitzFamily, psi: &[PsiSpec], horizon: usize) -> Result<HitScan> {
    check_point(sys, x)?;
    if family.dim() != sys.dim() || psi.len() != sys.dim() {
        return Err(argument("family, ψ vector and system must share the dimension"));
    }
    if horizon == 0 {
        return Err(argument("horizon must be at least 1"));
    }
    for p in psi {
        p.check_horizon(horizon)?;
    }
    let mut scan = HitScan::default();
    let mut orbit = x.coords().to_vec();
    for n in 1..=horizon {
        orbit = sys.step(&orbit);
        let target = family.apply(n, x.coords());
        let mut outcome = Decision::Inside;
        for i in 0..sys.dim() {
            let dist = circle_distance(orbit[i], target[i]);
            match strictly_below(dist, psi[i].value(n)?) {
                Decision::Outside => {
                    outcome = Decision::Outside;
                    break;
                }
                Decision::Boundary => outcome = Decision::Boundary,
                Decision::Inside => {}
            }
        }
        match outcome {
            Decision::Inside => scan.hits.push(n),
            Decision::Boundary => scan.indeterminate.push(n),
            Decision::Outside => {}
        }
    }
    Ok(scan)
}

/// `Π_i |T_{β_i}^n x_i − x_i|`, the hyperboloid recurrence functional.
pub fn recurrence_product(orbit: &[f64], x: &[f64]) -> f64 {
    orbit.iter().zip(x).map(|(a, b)| circle_distance(*a, *b)).product()
}

/// Times with `Π_i |T_{β_i}^n x_i − x_i| < ψ(n)`.
pub fn hits_hyperboloid(sys: &DiagonalSystem, x: &TorusPoint, psi: &PsiSpec, horizon: usize) -> Result<HitScan> {
    check_point(sys, x)?;
    if horizon == 0 {
        return Err(argument("horizon must be at least 1"));
    }
    psi.check_horizon(horizon)?;
    let mut scan = HitScan::default();
    let mut orbit = x.coords().to_vec();
    for n in 1..=horizon {
        orbit = sys.step(&orbit);
        match strictly_below(recurrence_product(&orbit, x.coords()), psi.value(n)?) {
            Decision::Inside => scan.hits.push(n),
            Decision::Boundary => scan.indeterminate.push(n),
            Decision::Outside => {}
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductInclusionReport {
    pub betas: Vec<f64>,
    pub horizon: usize,
    pub samples: usize,
    pub seed: u64,
    /// `(sample, n)` pairs where the last coordinate recurs.
    pub one_dimensional_hits: usize,
    pub preserved: usize,
    pub violations: usize,
    pub indeterminate: usize,
}

/// Checks that a recurrence time of the last coordinate alone is a hit of
/// the `d`-dimensional hyperboloid set for arbitrary leading coordinates.
pub fn product_inclusion_check(betas: &[f64], psi: &PsiSpec, horizon: usize, samples: usize, seed: u64) -> Result<ProductInclusionReport> {
    let sys = DiagonalSystem::new(betas)?;
    let d = sys.dim();
    if d < 2 {
        return Err(argument("product inclusion needs d ≥ 2"));
    }
    let last = DiagonalSystem::new(&betas[d - 1..])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProductInclusionReport {
        betas: betas.to_vec(),
        horizon,
        samples,
        seed,
        one_dimensional_hits: 0,
        preserved: 0,
        violations: 0,
        indeterminate: 0,
    };
    for _ in 0..samples {
        let coords: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let point = TorusPoint::new(coords.clone());
        let tail = TorusPoint::new(vec![coords[d - 1]]);
        let one = hits_hyperboloid(&last, &tail, psi, horizon)?;
        let full = hits_hyperboloid(&sys, &point, psi, horizon)?;
        for n in one.hits {
            report.one_dimensional_hits += 1;
            if full.hits.contains(&n) {
                report.preserved += 1;
            } else if full.indeterminate.contains(&n) {
                report.indeterminate += 1;
            } else {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::exact::{self, Rational};

    #[test]
    fn fixed_point_hits_every_time() {
        let sys = DiagonalSystem::new(&[2.0, 3.5]).unwrap();
        let x = TorusPoint::new(vec![0.0, 0.0]);
        let fam = LipschitzFamily::parse("const:0", 2).unwrap();
        let psi = vec![PsiSpec::exponential(-1.0); 2];
        let scan = hits_rectangle(&sys, &x, &fam, &psi, 12).unwrap();
        assert_eq!(scan.hits, (1..=12).collect::<Vec<_>>());
        let prod = hits_hyperboloid(&sys, &x, &PsiSpec::exponential(-1.0), 12).unwrap();
        assert_eq!(prod.hits.len(), 12);
    }

    #[test]
    fn period_two_orbit_of_one_third() {
        // Doubling sends 1/3 to 2/3 and back; the exact orbit decides hits.
        let third = Rational::new(1, 3).unwrap();
        let oracle: Vec<usize> = (1..=6)
            .filter(|&n| {
                let y = exact::iterate(2, third, n).to_f64();
                circle_distance(y, 1.0 / 3.0) < 0.1
            })
            .collect();
        assert_eq!(oracle, vec![2, 4, 6]);
        let sys = DiagonalSystem::new(&[2.0]).unwrap();
        let fam = LipschitzFamily::parse("const:0.3333333333333333", 1).unwrap();
        let scan = hits_rectangle(&sys, &TorusPoint::new(vec![1.0 / 3.0]), &fam, &[PsiSpec::constant(0.1).unwrap()], 6).unwrap();
        assert_eq!(scan.hits, oracle);
    }

    #[test]
    fn hyperboloid_hits_against_exact_orbits() {
        let xs = [Rational::new(1, 3).unwrap(), Rational::new(1, 2).unwrap()];
        let bases = [2u64, 3];
        let oracle: Vec<usize> = (1..=8)
            .filter(|&n| {
                let prod: f64 = xs
                    .iter()
                    .zip(bases)
                    .map(|(x, b)| circle_distance(exact::iterate(b, *x, n).to_f64(), x.to_f64()))
                    .product();
                prod < 0.05
            })
            .collect();
        assert_eq!(oracle, (1..=8).collect::<Vec<_>>());
        let sys = DiagonalSystem::new(&[2.0, 3.0]).unwrap();
        let scan = hits_hyperboloid(&sys, &TorusPoint::new(vec![1.0 / 3.0, 0.5]), &PsiSpec::constant(0.05).unwrap(), 8).unwrap();
        assert_eq!(scan.hits, oracle);
    }

    #[test]
    fn rectangle_hits_are_hyperboloid_hits() {
        let sys = DiagonalSystem::new(&[2.0, 2.5]).unwrap();
        let fam = LipschitzFamily::uniform(ScalarMap::Identity, 2);
        let psi = PsiSpec::constant(0.2).unwrap();
        let root = PsiSpec::constant(0.2f64.sqrt()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x = TorusPoint::new(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
            let rect = hits_rectangle(&sys, &x, &fam, &[root.clone(), root.clone()], 15).unwrap();
            let prod = hits_hyperboloid(&sys, &x, &psi, 15).unwrap();
            for n in rect.hits {
                assert!(prod.hits.contains(&n) || prod.indeterminate.contains(&n));
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sys = DiagonalSystem::new(&[2.0, 3.0]).unwrap();
        let x = TorusPoint::new(vec![0.1]);
        assert!(hits_hyperboloid(&sys, &x, &PsiSpec::exponential(-1.0), 3).is_err());
    }

    #[test]
    fn product_inclusion_small_sweep() {
        let r = product_inclusion_check(&[2.0, 2.0, 2.0], &PsiSpec::exponential(-0.3), 12, 500, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.one_dimensional_hits > 0);
    }

    #[test]
    fn huge_radius_hits_everything() {
        let r = product_inclusion_check(&[2.0, 3.0], &PsiSpec::constant(0.3).unwrap(), 10, 50, 2).unwrap();
        assert_eq!(r.violations, 0);
        let sys = DiagonalSystem::new(&[2.0, 3.0]).unwrap();
        let scan = hits_hyperboloid(&sys, &TorusPoint::new(vec![0.7, 0.4]), &PsiSpec::constant(0.3).unwrap(), 10).unwrap();
        assert_eq!(scan.hits.len(), 10);
    }
}
