//! Positive radius sequences `ψ: ℕ → (0, ∞)`.
//!
//! `ln ψ(n)` is computed analytically for closed forms, so decay rates stay
//! meaningful after `ψ(n)` itself underflows.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum PsiSpec {
    /// `scale · e^{rate·n}`.
    Exponential { rate: f64, scale: f64 },
    /// `scale · n^{exponent}`.
    Power { exponent: f64, scale: f64 },
    /// `scale · e^{rate·n^{power}}`.
    Stretched { rate: f64, power: f64, scale: f64 },
    /// `odd(n)` for odd `n`, `even(n)` for even `n`.
    Alternating { odd: Box<PsiSpec>, even: Box<PsiSpec> },
    /// Sampled values `ψ(1), …, ψ(len)`.
    Table { values: Vec<f64> },
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(argument(format!("ψ scale must be positive and finite, got {scale}")));
    }
    Ok(())
}

impl PsiSpec {
    pub fn exponential(rate: f64) -> Self {
        Self::Exponential { rate, scale: 1.0 }
    }

    pub fn scaled_exponential(rate: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        if !rate.is_finite() {
            return Err(argument("exponential rate must be finite"));
        }
        Ok(Self::Exponential { rate, scale })
    }

    pub fn power(exponent: f64) -> Self {
        Self::Power { exponent, scale: 1.0 }
    }

    pub fn scaled_power(exponent: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        if !exponent.is_finite() {
            return Err(argument("power exponent must be finite"));
        }
        Ok(Self::Power { exponent, scale })
    }

    /// The constant sequence `ψ ≡ value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::scaled_power(0.0, value)
    }

    pub fn stretched(rate: f64, power: f64) -> Result<Self> {
        if !(rate.is_finite() && power.is_finite() && power > 0.0) {
            return Err(argument("stretched exponential needs finite rate and positive power"));
        }
        Ok(Self::Stretched { rate, power, scale: 1.0 })
    }

    pub fn alternating(odd: PsiSpec, even: PsiSpec) -> Self {
        Self::Alternating {
            odd: Box::new(odd),
            even: Box::new(even),
        }
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(argument("ψ table is empty"));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(argument(format!("ψ({}) = {v} is not positive", i + 1)));
        }
        Ok(Self::Table { values })
    }

    /// Structural validation, used after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate, scale } => {
                check_scale(*scale)?;
                if !rate.is_finite() {
                    return Err(argument("exponential rate must be finite"));
                }
            }
            Self::Power { exponent, scale } => {
                check_scale(*scale)?;
                if !exponent.is_finite() {
                    return Err(argument("power exponent must be finite"));
                }
            }
            Self::Stretched { rate, power, scale } => {
                check_scale(*scale)?;
                if !(rate.is_finite() && power.is_finite() && *power > 0.0) {
                    return Err(argument("stretched exponential needs finite rate and positive power"));
                }
            }
            Self::Alternating { odd, even } => {
                odd.validate()?;
                even.validate()?;
            }
            Self::Table { values } => {
                Self::table(values.clone())?;
            }
        }
        Ok(())
    }

    /// Last index with a value, or `None` for closed forms.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Self::Table { values } => Some(values.len()),
            Self::Alternating { odd, even } => match (odd.horizon(), even.horizon()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            _ => None,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        self.horizon().is_none()
    }

    /// Error unless `ψ(n)` is defined for every `n ≤ horizon`.
    pub fn check_horizon(&self, horizon: usize) -> Result<()> {
        match self.horizon() {
            Some(h) if h < horizon => Err(argument(format!("ψ is sampled up to n = {h}, horizon {horizon} requested"))),
            _ => Ok(()),
        }
    }

    /// `ln ψ(n)` for `n ≥ 1`.
    pub fn ln_value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(argument("ψ is indexed from n = 1"));
        }
        let nf = n as f64;
        Ok(match self {
            Self::Exponential { rate, scale } => scale.ln() + rate * nf,
            Self::Power { exponent, scale } => scale.ln() + exponent * nf.ln(),
            Self::Stretched { rate, power, scale } => scale.ln() + rate * nf.powf(*power),
            Self::Alternating { odd, even } => {
                if n % 2 == 1 {
                    odd.ln_value(n)?
                } else {
                    even.ln_value(n)?
                }
            }
            Self::Table { values } => values
                .get(n - 1)
                .ok_or_else(|| argument(format!("ψ table has no value at n = {n}")))?
                .ln(),
        })
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(argument("ψ is indexed from n = 1"));
        }
        let nf = n as f64;
        match self {
            Self::Exponential { rate, scale } => Ok(scale * (rate * nf).exp()),
            Self::Power { exponent, scale } => Ok(scale * nf.powf(*exponent)),
            Self::Stretched { rate, power, scale } => Ok(scale * (rate * nf.powf(*power)).exp()),
            Self::Alternating { odd, even } => {
                if n % 2 == 1 {
                    odd.value(n)
                } else {
                    even.value(n)
                }
            }
            Self::Table { values } => values
                .get(n - 1)
                .copied()
                .ok_or_else(|| argument(format!("ψ table has no value at n = {n}"))),
        }
    }

    /// `−ln ψ(n) / n`.
    pub fn rate_at(&self, n: usize) -> Result<f64> {
        Ok(-self.ln_value(n)? / n as f64)
    }
}

impl FromStr for PsiSpec {
    type Err = Error;

    /// Grammar: `exp:<rate>[,<scale>]` for `scale·e^{rate·n}`,
    /// `pow:<exponent>[,<scale>]` for `scale·n^{exponent}`, and
    /// `table:<path>` for a file of positive values `ψ(1), ψ(2), …`
    /// separated by whitespace or commas.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| argument(format!("ψ descriptor {s:?} lacks a `kind:` prefix")))?;
        let numbers = |rest: &str| -> Result<Vec<f64>> {
            rest.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| argument(format!("bad number {t:?} in ψ descriptor {s:?}"))))
                .collect()
        };
        match kind.trim() {
            "exp" => match numbers(rest)?.as_slice() {
                [rate] => Self::scaled_exponential(*rate, 1.0),
                [rate, scale] => Self::scaled_exponential(*rate, *scale),
                _ => Err(argument(format!("expected exp:<rate>[,<scale>], got {s:?}"))),
            },
            "pow" => match numbers(rest)?.as_slice() {
                [e] => Self::scaled_power(*e, 1.0),
                [e, scale] => Self::scaled_power(*e, *scale),
                _ => Err(argument(format!("expected pow:<exponent>[,<scale>], got {s:?}"))),
            },
            "table" => Self::from_table_file(rest.trim()),
            other => Err(argument(format!("unknown ψ kind {other:?}; expected exp, pow or table"))),
        }
    }
}

impl PsiSpec {
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| argument(format!("cannot read ψ table {}: {e}", path.display())))?;
        Self::from_table_text(&text)
    }

    pub fn from_table_text(text: &str) -> Result<Self> {
        let values = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| argument(format!("bad ψ table entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::table(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let p = PsiSpec::exponential(-2.0);
        assert!((p.value(3).unwrap() - (-6f64).exp()).abs() < 1e-18);
        let q = PsiSpec::power(-3.0);
        assert!((q.value(2).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(PsiSpec::constant(0.05).unwrap().value(17).unwrap(), 0.05);
    }

    #[test]
    fn underflowing_values_keep_their_logarithm() {
        let p = PsiSpec::stretched(-1.0, 2.0).unwrap();
        assert_eq!(p.value(100).unwrap(), 0.0);
        assert_eq!(p.ln_value(100).unwrap(), -10_000.0);
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        assert!(PsiSpec::table(vec![0.1, 0.0]).is_err());
        assert!(PsiSpec::scaled_exponential(-1.0, 0.0).is_err());
        assert!(PsiSpec::constant(-0.5).is_err());
    }

    #[test]
    fn parses_descriptors() {
        assert_eq!("exp:-0.7".parse::<PsiSpec>().unwrap(), PsiSpec::exponential(-0.7));
        assert_eq!(
            "exp:-0.1,0.2".parse::<PsiSpec>().unwrap(),
            PsiSpec::Exponential { rate: -0.1, scale: 0.2 }
        );
        assert_eq!("pow:-3".parse::<PsiSpec>().unwrap(), PsiSpec::power(-3.0));
        assert!("sin:1".parse::<PsiSpec>().is_err());
        assert!("exp".parse::<PsiSpec>().is_err());
    }

    #[test]
    fn table_text_and_horizon() {
        let t = PsiSpec::from_table_text("0.5, 0.25\n0.125").unwrap();
        assert_eq!(t.horizon(), Some(3));
        assert!(t.value(4).is_err());
        assert!(t.check_horizon(4).is_err());
        assert!(t.check_horizon(3).is_ok());
    }

    #[test]
    fn alternating_picks_parity() {
        let p = PsiSpec::alternating(PsiSpec::exponential(-1.0), PsiSpec::exponential(-2.0));
        assert_eq!(p.rate_at(3).unwrap(), 1.0);
        assert_eq!(p.rate_at(4).unwrap(), 2.0);
    }
}
