use serde::{Deserialize, Serialize};

/// Reduce a real number into `[0, 1)`.
pub fn reduce(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance on the circle `ℝ/ℤ`: `min(|a−b|, 1−|a−b|)` after reduction.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Euclidean combination of coordinatewise circle distances.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "torus points of different dimension");
    a.iter()
        .zip(b)
        .map(|(x, y)| circle_distance(*x, *y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// A point of `𝕋^d` with every coordinate reduced into `[0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Self(coords.into().into_iter().map(reduce).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &TorusPoint) -> f64 {
        torus_distance(&self.0, &other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraparound() {
        assert!((circle_distance(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(circle_distance(0.3, 0.3), 0.0);
        assert!(circle_distance(0.0, 0.5) <= 0.5);
    }

    #[test]
    fn euclidean_combination() {
        let d = torus_distance(&[0.0, 0.0], &[0.5, 0.5]);
        assert!((d - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn points_are_reduced() {
        let p = TorusPoint::new(vec![1.25, -0.25, 3.0]);
        assert_eq!(p.coords(), &[0.25, 0.75, 0.0]);
    }
}
