//! Small dense integer matrices with exact arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// A square integer matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if dim == 0 {
            return Err(argument("matrix dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(argument(format!("{} entries do not form a {dim}×{dim} matrix", entries.len())));
        }
        Ok(Self { dim, entries })
    }

    /// Square matrix from a flat row-major list; the length must be a square.
    pub fn from_flat(entries: Vec<i64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1; dim])
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(<[i64]>::to_vec).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.dim != other.dim {
            return Err(argument("matrix dimensions differ"));
        }
        let n = self.dim;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                out[i * n + j] = i64::try_from(acc).map_err(|_| argument("matrix product overflows i64"))?;
            }
        }
        Ok(IntMatrix { dim: n, entries: out })
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn diagonal_entries(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i128 {
        let n = self.dim;
        let mut a: Vec<Vec<i128>> = self.rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    fn minor(&self, row: usize, col: usize) -> IntMatrix {
        let n = self.dim;
        let entries = (0..n)
            .filter(|&i| i != row)
            .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        IntMatrix { dim: n - 1, entries }
    }

    /// Integer inverse of a matrix with determinant ±1.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let det = self.det();
        if det.abs() != 1 {
            return Err(argument(format!("determinant {det} is not ±1")));
        }
        let n = self.dim;
        if n == 1 {
            return Ok(IntMatrix { dim: 1, entries: vec![det as i64] });
        }
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(j, i).det() * if (i + j) % 2 == 0 { 1 } else { -1 };
                entries[i * n + j] = i64::try_from(cof * det).map_err(|_| argument("inverse entry overflows i64"))?;
            }
        }
        Ok(IntMatrix { dim: n, entries })
    }

    /// Coefficients `c_0, …, c_d` of `det(λI − A) = Σ c_k λ^k`, by the
    /// Faddeev–LeVerrier recursion. The divisions are exact over ℤ.
    pub fn characteristic_polynomial(&self) -> Vec<i128> {
        let n = self.dim;
        let a: Vec<i128> = self.entries.iter().map(|&v| v as i128).collect();
        let mut coeffs = vec![0i128; n + 1];
        coeffs[n] = 1;
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            // M_k = A M_{k−1} + c_{n−k+1} I
            let mut next = vec![0i128; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0i128;
                    for l in 0..n {
                        acc += a[i * n + l] * m[l * n + j];
                    }
                    next[i * n + j] = acc;
                }
                next[i * n + i] += coeffs[n - k + 1];
            }
            m = next;
            let mut tr = 0i128;
            for i in 0..n {
                for l in 0..n {
                    tr += a[i * n + l] * m[l * n + i];
                }
            }
            coeffs[n - k] = -tr / k as i128;
        }
        coeffs
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

fn eval(coeffs: &[i128], x: i128) -> Option<i128> {
    coeffs.iter().rev().try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c))
}

fn deflate(coeffs: &[i128], root: i128) -> Vec<i128> {
    // Synthetic division by (λ − root).
    let n = coeffs.len() - 1;
    let mut out = vec![0i128; n];
    let mut carry = 0i128;
    for k in (1..=n).rev() {
        carry = coeffs[k] + carry * root;
        out[k - 1] = carry;
    }
    out
}

/// All roots of a monic integer polynomial if every root is an integer,
/// with multiplicity and in increasing order.
pub fn integer_roots(coeffs: &[i128]) -> Option<Vec<i128>> {
    let mut poly = coeffs.to_vec();
    let mut roots = Vec::new();
    while poly.len() > 1 {
        if poly[0] == 0 {
            roots.push(0);
            poly = deflate(&poly, 0);
            continue;
        }
        let c0 = poly[0].unsigned_abs();
        let mut found = None;
        let mut d = 1u128;
        'search: while d * d <= c0 {
            if c0 % d == 0 {
                for cand in [d, c0 / d] {
                    for s in [cand as i128, -(cand as i128)] {
                        if eval(&poly, s) == Some(0) {
                            found = Some(s);
                            break 'search;
                        }
                    }
                }
            }
            d += 1;
        }
        let r = found?;
        roots.push(r);
        poly = deflate(&poly, r);
    }
    roots.sort_unstable();
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse() {
        let p = IntMatrix::from_flat(vec![1, 1, 0, -1]).unwrap();
        assert_eq!(p.det(), -1);
        assert_eq!(p.unimodular_inverse().unwrap(), p);
        let q = IntMatrix::from_flat(vec![2, 1, 1, 1, 1, 0, 0, 3, 1]).unwrap();
        assert_eq!(q.det(), 2 * 1 - 1 * 1 + 1 * 3);
        let u = IntMatrix::from_flat(vec![2, 1, 1, 1]).unwrap();
        assert_eq!(u.mul(&u.unimodular_inverse().unwrap()).unwrap(), IntMatrix::identity(2));
        assert!(IntMatrix::from_flat(vec![2, 0, 0, 1]).unwrap().unimodular_inverse().is_err());
    }

    #[test]
    fn characteristic_polynomials() {
        // λ² − 5λ + 6
        let t = IntMatrix::from_flat(vec![3, 1, 0, 2]).unwrap();
        assert_eq!(t.characteristic_polynomial(), vec![6, -5, 1]);
        assert_eq!(integer_roots(&[6, -5, 1]), Some(vec![2, 3]));
        // λ² − 3λ + 1 has irrational roots.
        let cat = IntMatrix::from_flat(vec![2, 1, 1, 1]).unwrap();
        assert_eq!(integer_roots(&cat.characteristic_polynomial()), None);
        let d = IntMatrix::diagonal(&[2, 2, 5]);
        assert_eq!(integer_roots(&d.characteristic_polynomial()), Some(vec![2, 2, 5]));
    }
}
