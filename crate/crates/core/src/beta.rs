//! The beta-transformation `T(x) = βx mod 1` on `[0,1)` and greedy
//! beta-expansions.
//!
//! All orbit arithmetic is double precision. Digit extraction is
//! discontinuous, so any orbit value `β·T^{k-1}x` that lands within
//! [`BOUNDARY_GUARD`] of an integer (without being one) is snapped to that
//! integer and the position is recorded in [`Expansion::ambiguous_at`].

use serde::{Deserialize, Serialize};

use crate::error::{argument, domain, Result};

/// Guard band for digit extraction near integer boundaries.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// A base `β > 1` together with its digit alphabet `{0, …, ⌈β−1⌉}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSystem {
    beta: f64,
    alphabet_max: u32,
}

impl BetaSystem {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 1.0 {
            return Err(argument(format!("base must be a finite real > 1, got {beta}")));
        }
        let alphabet_max = (beta - 1.0).ceil() as u32;
        Ok(Self { beta, alphabet_max })
    }

    /// The golden mean `(1+√5)/2`, the smallest base with a non-trivial
    /// admissibility structure.
    pub fn golden() -> Self {
        Self::new((1.0 + 5f64.sqrt()) / 2.0).expect("golden mean exceeds 1")
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest digit, `⌈β − 1⌉`.
    pub fn alphabet_max(&self) -> u32 {
        self.alphabet_max
    }

    /// `Some(b)` when `β` is the integer `b`.
    pub fn integer_base(&self) -> Option<u64> {
        let r = self.beta.round();
        (r == self.beta && r <= u32::MAX as f64).then_some(r as u64)
    }

    pub fn log_beta(&self) -> f64 {
        self.beta.ln()
    }

    /// `β^{-n}`, the length of a full cylinder of order `n`.
    pub fn full_length(&self, n: usize) -> f64 {
        self.beta.powi(-(n as i32))
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(0.0..1.0).contains(&x) {
            return Err(domain(format!("point {x} is outside [0,1)")));
        }
        Ok(())
    }

    /// One step of the transformation, `βx − ⌊βx⌋`.
    pub fn apply(&self, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.step(x))
    }

    pub(crate) fn step(&self, x: f64) -> f64 {
        let v = self.beta * x;
        let r = v - v.floor();
        // βx < β keeps r in [0,1); rounding can still produce 1.0.
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }

    /// `T^n x`.
    pub fn iterate(&self, x: f64, n: usize) -> Result<f64> {
        self.check_point(x)?;
        Ok((0..n).fold(x, |y, _| self.step(y)))
    }

    /// First `n` digits `ε_k = ⌊β T^{k-1} x⌋`.
    pub fn expand(&self, x: f64, n: usize) -> Result<Expansion> {
        self.check_point(x)?;
        if n == 0 {
            return Err(argument("expansion depth must be at least 1"));
        }
        let mut digits = Vec::with_capacity(n);
        let mut ambiguous_at = Vec::new();
        let mut y = x;
        for k in 0..n {
            let v = self.beta * y;
            let nearest = v.round();
            let off = (v - nearest).abs();
            let (digit, rest) = if off > 0.0
                && off < BOUNDARY_GUARD
                && nearest <= self.alphabet_max as f64
                && nearest < self.beta
            {
                ambiguous_at.push(k);
                (nearest as u32, 0.0)
            } else {
                let fl = v.floor();
                let rest = v - fl;
                (fl as u32, if rest >= 1.0 { 0.0 } else { rest })
            };
            digits.push(digit.min(self.alphabet_max));
            y = rest;
        }
        Ok(Expansion {
            word: Word(digits),
            ambiguous_at,
        })
    }

    /// Partial sum `Σ w_k β^{-k}`.
    pub fn evaluate(&self, word: &Word) -> f64 {
        // Horner from the last digit keeps the sum accurate.
        word.0
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + d as f64) / self.beta)
    }

    pub(crate) fn check_word(&self, word: &Word) -> Result<()> {
        if let Some(&d) = word.0.iter().find(|&&d| d > self.alphabet_max) {
            return Err(domain(format!(
                "digit {d} outside alphabet 0..={} for base {}",
                self.alphabet_max, self.beta
            )));
        }
        Ok(())
    }
}

/// A finite digit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn new(digits: Vec<u32>) -> Self {
        Self(digits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", s.join(""))
    }
}

impl std::str::FromStr for Word {
    type Err = crate::Error;

    /// Accepts comma separated digits (`1,0,1`) or a compact digit string
    /// (`101`) when every digit is a single character.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::default());
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| argument(format!("bad digit {t:?} in word {s:?}")))
        };
        let digits = if s.contains(',') {
            s.split(',').map(parse).collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| argument(format!("bad digit {c:?} in word {s:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word(digits))
    }
}

/// Digits of a point together with the positions where digit extraction
/// fell inside the boundary guard band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub word: Word,
    pub ambiguous_at: Vec<usize>,
}

impl Expansion {
    pub fn is_ambiguous(&self) -> bool {
        !self.ambiguous_at.is_empty()
    }
}

/// Exact arithmetic for integer bases on rational points `p/q`.
///
/// Used as an oracle for the floating point path: for `β = b ∈ ℕ` the
/// transformation acts on numerators modulo `q`.
pub mod exact {
    use crate::error::{argument, Result};

    use super::Word;

    /// A rational point `num/den` of `[0,1)`.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct Rational {
        pub num: u128,
        pub den: u128,
    }

    impl Rational {
        pub fn new(num: u128, den: u128) -> Result<Self> {
            if den == 0 || num >= den {
                return Err(argument(format!("{num}/{den} is not a point of [0,1)")));
            }
            Ok(Self { num, den })
        }

        pub fn to_f64(self) -> f64 {
            self.num as f64 / self.den as f64
        }
    }

    /// `T_b(p/q) = (b·p mod q)/q`.
    pub fn apply(base: u64, x: Rational) -> Rational {
        Rational {
            num: (x.num * base as u128) % x.den,
            den: x.den,
        }
    }

    pub fn iterate(base: u64, x: Rational, n: usize) -> Rational {
        (0..n).fold(x, |y, _| apply(base, y))
    }

    /// First `n` base-`b` digits of `p/q`.
    pub fn expand(base: u64, x: Rational, n: usize) -> Word {
        let b = base as u128;
        let mut p = x.num;
        let mut digits = Vec::with_capacity(n);
        for _ in 0..n {
            let v = p * b;
            digits.push((v / x.den) as u32);
            p = v % x.den;
        }
        Word(digits)
    }

    /// Exact cylinder `[left, left + b^{-n})` as `(left numerator, b^n)`.
    pub fn cylinder(base: u64, word: &Word) -> Result<(u128, u128)> {
        let b = base as u128;
        let mut num = 0u128;
        let mut den = 1u128;
        for &d in word.digits() {
            if d as u128 >= b {
                return Err(argument(format!("digit {d} not below base {base}")));
            }
            num = num
                .checked_mul(b)
                .and_then(|v| v.checked_add(d as u128))
                .ok_or_else(|| argument("word too long for exact arithmetic"))?;
            den = den
                .checked_mul(b)
                .ok_or_else(|| argument("word too long for exact arithmetic"))?;
        }
        Ok((num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bases_at_most_one() {
        assert!(BetaSystem::new(1.0).is_err());
        assert!(BetaSystem::new(0.5).is_err());
        assert!(BetaSystem::new(f64::NAN).is_err());
    }

    #[test]
    fn alphabet_is_ceiling_of_beta_minus_one() {
        assert_eq!(BetaSystem::new(2.0).unwrap().alphabet_max(), 1);
        assert_eq!(BetaSystem::new(1.5).unwrap().alphabet_max(), 1);
        assert_eq!(BetaSystem::new(3.0).unwrap().alphabet_max(), 2);
        assert_eq!(BetaSystem::new(std::f64::consts::E).unwrap().alphabet_max(), 2);
        assert_eq!(BetaSystem::new(2.5).unwrap().alphabet_max(), 2);
    }

    #[test]
    fn doubling_map_values() {
        let s = BetaSystem::new(2.0).unwrap();
        assert_eq!(s.apply(0.25).unwrap(), 0.5);
        assert_eq!(s.apply(0.0).unwrap(), 0.0);
    }

    #[test]
    fn apply_one_point_five() {
        let s = BetaSystem::new(1.5).unwrap();
        // 1.5 * 0.9 = 1.35, minus 1.
        assert!((s.apply(0.9).unwrap() - 0.35).abs() < 1e-15);
    }

    #[test]
    fn apply_rejects_points_outside_unit_interval() {
        let s = BetaSystem::new(2.0).unwrap();
        assert!(matches!(s.apply(1.0), Err(crate::Error::Domain(_))));
        assert!(matches!(s.apply(-0.1), Err(crate::Error::Domain(_))));
        assert!(s.expand(1.5, 3).is_err());
    }

    #[test]
    fn binary_expansion_matches_exact_oracle() {
        let s = BetaSystem::new(2.0).unwrap();
        let e = s.expand(0.625, 3).unwrap();
        let oracle = exact::expand(2, exact::Rational::new(5, 8).unwrap(), 3);
        assert_eq!(e.word, oracle);
        assert_eq!(e.word, Word(vec![1, 0, 1]));
        assert!(!e.is_ambiguous());
    }

    #[test]
    fn zero_orbit_expands_to_zeros() {
        for beta in [1.3, 2.0, 3.7] {
            let s = BetaSystem::new(beta).unwrap();
            assert_eq!(s.expand(0.0, 5).unwrap().word, Word::zeros(5));
        }
    }

    #[test]
    fn golden_mean_minus_one() {
        let s = BetaSystem::golden();
        let e = s.expand(s.beta() - 1.0, 3).unwrap();
        assert_eq!(e.word, Word(vec![1, 0, 0]));
    }

    #[test]
    fn evaluate_partial_sums() {
        let s = BetaSystem::new(2.0).unwrap();
        assert_eq!(s.evaluate(&Word(vec![1, 0, 1])), 0.625);
        assert_eq!(s.evaluate(&Word::default()), 0.0);
    }

    #[test]
    fn roundtrip_tail_bound() {
        let s = BetaSystem::new(2.7).unwrap();
        for &x in &[0.1, 0.31415, 0.5, 0.999] {
            for n in 1..15 {
                let e = s.expand(x, n).unwrap();
                let gap = x - s.evaluate(&e.word);
                assert!(gap >= -1e-15 && gap < s.full_length(n), "x={x} n={n} gap={gap}");
            }
        }
    }

    #[test]
    fn word_parsing() {
        assert_eq!("1,0,1".parse::<Word>().unwrap(), Word(vec![1, 0, 1]));
        assert_eq!("101".parse::<Word>().unwrap(), Word(vec![1, 0, 1]));
        assert_eq!("".parse::<Word>().unwrap(), Word::default());
        assert!("1,x".parse::<Word>().is_err());
    }

    #[test]
    fn exact_cylinder_endpoints() {
        let (num, den) = exact::cylinder(2, &Word(vec![1, 0])).unwrap();
        assert_eq!((num, den), (2, 4));
    }
}
