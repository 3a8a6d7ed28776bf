//! Sequences of Lipschitz target maps `f_n` acting coordinatewise on `𝕋^d`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::targets::torus::{circle_distance, reduce};

type MapFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

/// A user supplied sequence of circle maps with a declared uniform
/// Lipschitz constant. `lift(n, x)` must be continuous in `x` on `[0,1)`.
#[derive(Clone)]
pub struct CustomMap {
    pub label: String,
    pub lipschitz: f64,
    lift: Arc<MapFn>,
}

impl CustomMap {
    pub fn new(label: impl Into<String>, lipschitz: f64, lift: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            lipschitz,
            lift: Arc::new(lift),
        }
    }
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

/// One coordinate `f_n^{(i)}` of a target family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarMap {
    Constant { point: f64 },
    Identity,
    /// `x ↦ slope·x + offset`.
    Affine { slope: f64, offset: f64 },
    #[serde(skip)]
    Custom(CustomMap),
}

impl ScalarMap {
    /// A real lift of `f_n` on `[0,1)`: continuous, not reduced mod 1.
    pub fn lift(&self, n: usize, x: f64) -> f64 {
        match self {
            Self::Constant { point } => *point,
            Self::Identity => x,
            Self::Affine { slope, offset } => slope * x + offset,
            Self::Custom(c) => (c.lift)(n, x),
        }
    }

    /// `f_n(x)` as a point of the circle.
    pub fn apply(&self, n: usize, x: f64) -> f64 {
        reduce(self.lift(n, x))
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Identity => 1.0,
            Self::Affine { slope, .. } => slope.abs(),
            Self::Custom(c) => c.lipschitz,
        }
    }

    /// `(slope, offset)` when the lift is affine.
    pub fn affine(&self) -> Option<(f64, f64)> {
        match self {
            Self::Constant { point } => Some((0.0, *point)),
            Self::Identity => Some((1.0, 0.0)),
            Self::Affine { slope, offset } => Some((*slope, *offset)),
            Self::Custom(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Constant { point } => format!("const:{point}"),
            Self::Identity => "identity".to_string(),
            Self::Affine { slope, offset } => format!("affine:{slope},{offset}"),
            Self::Custom(c) => format!("custom:{}", c.label),
        }
    }
}

/// The family `{f_n}` on `𝕋^d`, one [`ScalarMap`] per axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzFamily {
    components: Vec<ScalarMap>,
}

/// Outcome of sampling `|f_n(x) − f_n(y)| ≤ c|x − y|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub declared: f64,
    pub max_ratio: f64,
    pub pairs: usize,
    pub violations: usize,
}

impl LipschitzFamily {
    pub fn new(components: Vec<ScalarMap>) -> Result<Self> {
        if components.is_empty() {
            return Err(argument("a target family needs at least one coordinate"));
        }
        Ok(Self { components })
    }

    /// The same map on every one of `d` axes.
    pub fn uniform(map: ScalarMap, d: usize) -> Self {
        Self {
            components: vec![map; d.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarMap {
        &self.components[i]
    }

    pub fn components(&self) -> &[ScalarMap] {
        &self.components
    }

    /// Uniform constant `c`; the maximum over coordinates bounds the
    /// Euclidean ratio of a coordinatewise map.
    pub fn lipschitz(&self) -> f64 {
        self.components.iter().map(ScalarMap::lipschitz).fold(0.0, f64::max)
    }

    /// `f_n(x)` reduced into `[0,1)^d`.
    pub fn apply(&self, n: usize, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "family and point dimensions differ");
        self.components.iter().zip(x).map(|(f, &xi)| f.apply(n, xi)).collect()
    }

    /// Parse `const:<p>[,<p2>,…]`, `identity` or `affine:<slope>,<offset>`
    /// for a `d`-dimensional torus. A single constant is broadcast.
    pub fn parse(desc: &str, d: usize) -> Result<Self> {
        let desc = desc.trim();
        let bad_number = |t: &str| argument(format!("bad number {t:?} in family descriptor {desc:?}"));
        if desc == "identity" {
            return Ok(Self::uniform(ScalarMap::Identity, d));
        }
        let (kind, rest) = desc
            .split_once(':')
            .ok_or_else(|| argument(format!("unknown family descriptor {desc:?}")))?;
        let numbers: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad_number(t)))
            .collect::<Result<_>>()?;
        match kind {
            "const" => match numbers.len() {
                1 => Ok(Self::uniform(ScalarMap::Constant { point: reduce(numbers[0]) }, d)),
                k if k == d => Self::new(numbers.into_iter().map(|p| ScalarMap::Constant { point: reduce(p) }).collect()),
                k => Err(argument(format!("const target has {k} coordinates, torus has {d}"))),
            },
            "affine" => match numbers.as_slice() {
                [slope, offset] => Ok(Self::uniform(ScalarMap::Affine { slope: *slope, offset: *offset }, d)),
                _ => Err(argument(format!("expected affine:<slope>,<offset>, got {desc:?}"))),
            },
            other => Err(argument(format!("unknown family kind {other:?}; expected const, identity or affine"))),
        }
    }

    /// Spot check of the declared constant on random pairs and times
    /// `n ≤ horizon`, with distances between `[0,1)` representatives.
    pub fn spot_check(&self, pairs: usize, horizon: usize, seed: u64) -> LipschitzCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = self.lipschitz();
        let d = self.dim();
        let mut max_ratio: f64 = 0.0;
        let mut violations = 0;
        for _ in 0..pairs {
            let n = rng.gen_range(1..=horizon.max(1));
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let dx = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dx == 0.0 {
                continue;
            }
            let fx = self.apply(n, &x);
            let fy = self.apply(n, &y);
            let df = fx
                .iter()
                .zip(&fy)
                .map(|(a, b)| circle_distance(*a, *b).powi(2))
                .sum::<f64>()
                .sqrt();
            let ratio = df / dx;
            max_ratio = max_ratio.max(ratio);
            if df > c * dx * (1.0 + 1e-12) + 1e-15 {
                violations += 1;
            }
        }
        LipschitzCheck {
            declared: c,
            max_ratio,
            pairs,
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_descriptors() {
        let f = LipschitzFamily::parse("const:0.25", 3).unwrap();
        assert_eq!(f.dim(), 3);
        assert_eq!(f.apply(1, &[0.1, 0.2, 0.3]), vec![0.25; 3]);
        let g = LipschitzFamily::parse("const:0.1,0.2", 2).unwrap();
        assert_eq!(g.apply(5, &[0.0, 0.0]), vec![0.1, 0.2]);
        let h = LipschitzFamily::parse("affine:2,0.5", 1).unwrap();
        assert_eq!(h.lipschitz(), 2.0);
        assert_eq!(h.apply(1, &[0.3]), vec![reduce(1.1)]);
        assert!(LipschitzFamily::parse("const:0.1,0.2,0.3", 2).is_err());
        assert!(LipschitzFamily::parse("wobble", 2).is_err());
    }

    #[test]
    fn declared_constants_hold_on_samples() {
        for desc in ["identity", "const:0.4", "affine:-0.5,0.2"] {
            let f = LipschitzFamily::parse(desc, 2).unwrap();
            let check = f.spot_check(2000, 10, 3);
            assert_eq!(check.violations, 0, "{desc}: {check:?}");
        }
    }

    #[test]
    fn understated_custom_constant_is_caught() {
        let f = LipschitzFamily::uniform(ScalarMap::Custom(CustomMap::new("triple", 1.0, |_, x| 0.3 * x)), 1);
        assert_eq!(f.spot_check(500, 5, 1).violations, 0);
        let g = LipschitzFamily::uniform(ScalarMap::Custom(CustomMap::new("steep", 0.1, |_, x| 0.4 * x)), 1);
        assert!(g.spot_check(500, 5, 1).violations > 0);
    }
}
