//! Experiment configuration: flat `key = value` text or a JSON object,
//! resolved into fully specified per-command parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use beta_targets::dimension::{tau_estimate, FormulaId, TailWindow};
use beta_targets::{LipschitzFamily, PsiSpec, ScalarMap};

pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Expand,
    Cylinders,
    Hits,
    Cover,
    Dimension,
    Conjugate,
    Sandwich,
    Estimate,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Expand,
        Command::Cylinders,
        Command::Hits,
        Command::Cover,
        Command::Dimension,
        Command::Conjugate,
        Command::Sandwich,
        Command::Estimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Cylinders => "cylinders",
            Command::Hits => "hits",
            Command::Cover => "cover",
            Command::Dimension => "dimension",
            Command::Conjugate => "conjugate",
            Command::Sandwich => "sandwich",
            Command::Estimate => "estimate",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Keys accepted by the command besides the global ones, and whether
    /// each is a bare switch.
    pub fn keys(self) -> &'static [(&'static str, bool)] {
        match self {
            Command::Expand => &[("beta", false), ("x", false), ("digits", false)],
            Command::Cylinders => &[("beta", false), ("order", false), ("full_only", true), ("budget", false)],
            Command::Hits => &[
                ("betas", false),
                ("x", false),
                ("psi", false),
                ("family", false),
                ("horizon", false),
                ("mode", false),
            ],
            Command::Cover => &[
                ("kind", false),
                ("beta", false),
                ("word", false),
                ("delta1", false),
                ("delta2", false),
                ("delta", false),
                ("delta_max", false),
                ("dim", false),
                ("s", false),
                ("betas", false),
                ("n", false),
                ("psi", false),
                ("samples", false),
                ("budget", false),
            ],
            Command::Dimension => &[
                ("betas", false),
                ("tau", false),
                ("psi", false),
                ("formula", false),
                ("matrix", false),
                ("p", false),
            ],
            Command::Conjugate => &[("matrix", false), ("p", false), ("samples", false), ("horizon", false)],
            Command::Sandwich => &[
                ("matrix", false),
                ("p", false),
                ("psi", false),
                ("family", false),
                ("horizon", false),
                ("samples", false),
                ("mutate", true),
            ],
            Command::Estimate => &[
                ("betas", false),
                ("psi", false),
                ("family", false),
                ("kind", false),
                ("depths", false),
                ("resolutions", false),
                ("budget", false),
            ],
        }
    }
}

/// Keys valid for every command.
pub const GLOBAL_KEYS: [&str; 5] = ["seed", "out", "format", "tolerance", "command"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "config key `{k}`: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

pub type RawConfig = BTreeMap<String, String>;

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Split text into raw `key → value` pairs. JSON objects are accepted when
/// the text starts with `{`; arrays become comma lists, and `;` lists for
/// `psi`.
pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return parse_json(trimmed);
    }
    let mut out = RawConfig::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::general(format!("line {}: expected `key = value`, got {line:?}", k + 1)))?;
        let key = normalize_key(key);
        let value = value.trim().trim_matches('"').to_string();
        if out.insert(key.clone(), value).is_some() {
            return Err(ConfigError::at(&key, "given more than once"));
        }
    }
    Ok(out)
}

fn json_scalar(key: &str, v: &serde_json::Value) -> Result<String, ConfigError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        _ => Err(ConfigError::at(key, "nested values are not supported")),
    }
}

fn parse_json(text: &str) -> Result<RawConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::general(format!("invalid JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| ConfigError::general("JSON config must be an object"))?;
    let mut out = RawConfig::new();
    for (key, v) in obj {
        let key = normalize_key(key);
        let text = match v {
            serde_json::Value::Null => continue,
            serde_json::Value::Array(items) => {
                let sep = if key == "psi" { ";" } else { "," };
                items.iter().map(|i| json_scalar(&key, i)).collect::<Result<Vec<_>, _>>()?.join(sep)
            }
            other => json_scalar(&key, other)?,
        };
        out.insert(key, text);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HitMode {
    Rect,
    Prod,
}

#[derive(Debug, Clone, Serialize)]
pub struct Family {
    pub descriptor: String,
    pub family: LipschitzFamily,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverParams {
    Annulus {
        beta: f64,
        word: Vec<u32>,
        delta1: f64,
        delta2: f64,
        samples: usize,
    },
    Hyperboloid {
        dim: usize,
        delta: f64,
        delta_max: f64,
        s: f64,
        samples: usize,
    },
    En {
        betas: Vec<f64>,
        n: usize,
        psi: PsiSpec,
        s: f64,
        samples: usize,
        budget: u64,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "plan", rename_all = "snake_case")]
pub enum Resolutions {
    Auto,
    List { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Hyperboloid,
    Target,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    Expand {
        beta: f64,
        x: f64,
        digits: usize,
    },
    Cylinders {
        beta: f64,
        order: usize,
        full_only: bool,
        budget: u64,
    },
    Hits {
        betas: Vec<f64>,
        x: Vec<f64>,
        psi: Vec<PsiSpec>,
        family: Family,
        horizon: usize,
        mode: HitMode,
    },
    Cover(CoverParams),
    Dimension {
        formula: FormulaId,
        betas: Option<Vec<f64>>,
        #[serde(with = "beta_targets::extreal::option")]
        tau: Option<f64>,
        psi: Vec<PsiSpec>,
        matrix: Option<Vec<i64>>,
        p: Option<Vec<i64>>,
    },
    Conjugate {
        matrix: Vec<i64>,
        p: Vec<i64>,
        samples: usize,
        horizon: usize,
    },
    Sandwich {
        matrix: Vec<i64>,
        p: Vec<i64>,
        psi: PsiSpec,
        family: Family,
        horizon: usize,
        samples: usize,
        mutate: bool,
    },
    Estimate {
        betas: Vec<f64>,
        psi: PsiSpec,
        kind: EstimateKind,
        family: Option<Family>,
        depths: (usize, usize),
        resolutions: Resolutions,
        budget: u64,
        tolerance: f64,
    },
}

/// A fully resolved run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub params: Params,
    pub warnings: Vec<String>,
}

/// Parse and validate configuration text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    resolve(&parse_raw(text)?)
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::at(key, "missing required field"))
    }

    fn number<T: std::str::FromStr>(&self, key: &str, text: &str) -> Result<T, ConfigError> {
        text.trim().parse::<T>().map_err(|_| ConfigError::at(key, format!("cannot parse {text:?}")))
    }

    fn opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key).map(|t| self.number(key, t)).transpose()
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn req<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let t = self.required(key)?;
        self.number(key, t)
    }

    fn list<T: std::str::FromStr>(&self, key: &str, text: &str) -> Result<Vec<T>, ConfigError> {
        text.split(',').filter(|t| !t.trim().is_empty()).map(|t| self.number(key, t)).collect()
    }

    fn req_list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, ConfigError> {
        let t = self.required(key)?;
        let v = self.list(key, t)?;
        if v.is_empty() {
            return Err(ConfigError::at(key, "empty list"));
        }
        Ok(v)
    }

    fn opt_list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        self.get(key).map(|t| self.list(key, t)).transpose()
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "1" | "yes" | "") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(other) => Err(ConfigError::at(key, format!("expected true or false, got {other:?}"))),
        }
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::at(key, format!("must be positive, got {v}")))
        }
    }

    fn psi_list(&self, warnings: &mut Vec<String>) -> Result<Vec<PsiSpec>, ConfigError> {
        let Some(text) = self.get("psi") else { return Ok(Vec::new()) };
        let mut out = Vec::new();
        for desc in text.split(';').map(str::trim).filter(|d| !d.is_empty()) {
            let spec: PsiSpec = desc.parse().map_err(|e| ConfigError::at("psi", format!("{e}")))?;
            if spec.is_closed_form() {
                if let Ok(summary) = tau_estimate(&spec, &TailWindow::default()) {
                    warnings.extend(summary.warnings.into_iter().map(|w| format!("psi {desc}: {w}")));
                }
            }
            out.push(spec);
        }
        Ok(out)
    }

    fn single_psi(&self, warnings: &mut Vec<String>) -> Result<Option<PsiSpec>, ConfigError> {
        let list = self.psi_list(warnings)?;
        match list.len() {
            0 => Ok(None),
            1 => Ok(list.into_iter().next()),
            k => Err(ConfigError::at("psi", format!("expected one descriptor, got {k}"))),
        }
    }

    fn family(&self, d: usize) -> Result<Family, ConfigError> {
        let descriptor = self.get("family").unwrap_or("identity").to_string();
        let family = LipschitzFamily::parse(&descriptor, d).map_err(|e| ConfigError::at("family", format!("{e}")))?;
        Ok(Family { descriptor, family })
    }

    fn betas(&self) -> Result<Vec<f64>, ConfigError> {
        let b: Vec<f64> = self.req_list("betas")?;
        if let Some(bad) = b.iter().find(|v| !(**v > 1.0 && v.is_finite())) {
            return Err(ConfigError::at("betas", format!("every base must exceed 1, got {bad}")));
        }
        Ok(b)
    }
}

fn parse_word(text: &str) -> Result<Vec<u32>, ConfigError> {
    let parts: Vec<&str> = if text.contains(',') { text.split(',').collect() } else { text.trim().split("").filter(|s| !s.is_empty()).collect() };
    parts
        .iter()
        .map(|t| t.trim().parse::<u32>().map_err(|_| ConfigError::at("word", format!("bad digit {t:?}"))))
        .collect()
}

fn parse_formula(text: &str) -> Result<FormulaId, ConfigError> {
    match text.trim().replace('-', "_").as_str() {
        "corollary" | "single_psi" => Ok(FormulaId::SinglePsi),
        "theorem1" | "hyperboloid" => Ok(FormulaId::Hyperboloid),
        "theorem2" | "partition" => Ok(FormulaId::Partition),
        "theorem6" | "diagonalizable" => Ok(FormulaId::Diagonalizable),
        other => Err(ConfigError::at(
            "formula",
            format!("unknown formula {other:?}; expected single_psi, hyperboloid, partition or diagonalizable"),
        )),
    }
}

fn parse_depths(text: &str) -> Result<(usize, usize), ConfigError> {
    let bad = || ConfigError::at("depths", format!("expected <first>:<last>, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

/// Validate a raw key map into a run.
pub fn resolve(raw: &RawConfig) -> Result<ExperimentConfig, ConfigError> {
    let r = Reader { raw };
    let name = r.required("command")?;
    let command = Command::parse(name).ok_or_else(|| ConfigError::at("command", format!("unknown command {name:?}")))?;
    for key in raw.keys() {
        let known = GLOBAL_KEYS.contains(&key.as_str()) || command.keys().iter().any(|(k, _)| k == key);
        if !known {
            return Err(ConfigError::at(key, format!("unknown key for command `{}`", command.name())));
        }
    }
    let seed = r.or("seed", 0u64)?;
    let tolerance = r.opt::<f64>("tolerance")?.map(|t| r.positive("tolerance", t)).transpose()?;
    let out = r.get("out").map(PathBuf::from);
    let format = match r.get("format").unwrap_or("json") {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(ConfigError::at("format", format!("expected json or csv, got {other:?}"))),
    };
    let mut warnings = Vec::new();
    let params = match command {
        Command::Expand => {
            let x: f64 = r.req("x")?;
            if !(0.0..1.0).contains(&x) {
                return Err(ConfigError::at("x", format!("must lie in [0, 1), got {x}")));
            }
            Params::Expand {
                beta: r.req("beta")?,
                x,
                digits: r.or("digits", 20)?,
            }
        }
        Command::Cylinders => Params::Cylinders {
            beta: r.req("beta")?,
            order: r.req("order")?,
            full_only: r.flag("full_only")?,
            budget: r.or("budget", DEFAULT_BUDGET)?,
        },
        Command::Hits => {
            let betas = r.betas()?;
            let d = betas.len();
            let x: Vec<f64> = r.req_list("x")?;
            if x.len() != d {
                return Err(ConfigError::at("x", format!("has {} coordinates, betas has {d}", x.len())));
            }
            let mode = match r.get("mode").unwrap_or("rect") {
                "rect" => HitMode::Rect,
                "prod" => HitMode::Prod,
                other => return Err(ConfigError::at("mode", format!("expected rect or prod, got {other:?}"))),
            };
            let mut psi = r.psi_list(&mut warnings)?;
            if psi.is_empty() {
                return Err(ConfigError::at("psi", "missing required field"));
            }
            if mode == HitMode::Rect && psi.len() == 1 {
                psi = vec![psi[0].clone(); d];
            }
            if (mode == HitMode::Rect && psi.len() != d) || (mode == HitMode::Prod && psi.len() != 1) {
                return Err(ConfigError::at("psi", format!("{} descriptors do not fit mode {mode:?} in dimension {d}", psi.len())));
            }
            Params::Hits {
                family: r.family(d)?,
                betas,
                x,
                psi,
                horizon: r.or("horizon", 50)?,
                mode,
            }
        }
        Command::Cover => {
            let samples = r.or("samples", 10_000)?;
            match r.required("kind")? {
                "annulus" => Params::Cover(CoverParams::Annulus {
                    beta: r.req("beta")?,
                    word: parse_word(r.required("word")?)?,
                    delta1: r.req("delta1")?,
                    delta2: r.req("delta2")?,
                    samples,
                }),
                "hyperboloid" => Params::Cover(CoverParams::Hyperboloid {
                    dim: r.or("dim", 2)?,
                    delta: r.req("delta")?,
                    delta_max: r.or("delta_max", beta_targets::covering::HyperboloidOptions::default().delta_max)?,
                    s: r.req("s")?,
                    samples,
                }),
                "en" => Params::Cover(CoverParams::En {
                    betas: r.betas()?,
                    n: r.req("n")?,
                    psi: r.single_psi(&mut warnings)?.ok_or_else(|| ConfigError::at("psi", "missing required field"))?,
                    s: r.req("s")?,
                    samples,
                    budget: r.or("budget", DEFAULT_BUDGET)?,
                }),
                other => return Err(ConfigError::at("kind", format!("expected annulus, hyperboloid or en, got {other:?}"))),
            }
        }
        Command::Dimension => {
            let matrix = r.opt_list::<i64>("matrix")?;
            let p = r.opt_list::<i64>("p")?;
            let psi = r.psi_list(&mut warnings)?;
            let tau = r.opt::<f64>("tau")?;
            if let Some(t) = tau {
                if !(t >= 0.0) {
                    return Err(ConfigError::at("tau", format!("must be nonnegative, got {t}")));
                }
            }
            let formula = match r.get("formula") {
                Some(f) => parse_formula(f)?,
                None if matrix.is_some() => FormulaId::Diagonalizable,
                None if psi.len() > 1 => FormulaId::Partition,
                None => FormulaId::SinglePsi,
            };
            let betas = if formula == FormulaId::Diagonalizable { None } else { Some(r.betas()?) };
            if formula == FormulaId::Diagonalizable && (matrix.is_none() || p.is_none()) {
                return Err(ConfigError::at(if matrix.is_none() { "matrix" } else { "p" }, "missing required field"));
            }
            if formula == FormulaId::Partition && psi.is_empty() {
                return Err(ConfigError::at("psi", "missing required field"));
            }
            if formula != FormulaId::Partition && tau.is_none() && psi.len() != 1 {
                return Err(ConfigError::at("tau", "missing required field (or give one psi descriptor)"));
            }
            Params::Dimension {
                formula,
                betas,
                tau,
                psi,
                matrix,
                p,
            }
        }
        Command::Conjugate => Params::Conjugate {
            matrix: r.req_list("matrix")?,
            p: r.req_list("p")?,
            samples: r.or("samples", 1000)?,
            horizon: r.or("horizon", 20)?,
        },
        Command::Sandwich => {
            let matrix: Vec<i64> = r.req_list("matrix")?;
            let d = (matrix.len() as f64).sqrt().round() as usize;
            Params::Sandwich {
                p: r.req_list("p")?,
                psi: r.single_psi(&mut warnings)?.unwrap_or(PsiSpec::constant(0.05).expect("positive constant")),
                family: r.family(d.max(1))?,
                horizon: r.or("horizon", 20)?,
                samples: r.or("samples", 1000)?,
                mutate: r.flag("mutate")?,
                matrix,
            }
        }
        Command::Estimate => {
            let betas = r.betas()?;
            let psi = r.single_psi(&mut warnings)?.ok_or_else(|| ConfigError::at("psi", "missing required field"))?;
            let kind = match r.get("kind") {
                None if r.get("family").is_some() => EstimateKind::Target,
                None | Some("hyperboloid") => EstimateKind::Hyperboloid,
                Some("target") => EstimateKind::Target,
                Some(other) => return Err(ConfigError::at("kind", format!("expected hyperboloid or target, got {other:?}"))),
            };
            let family = if kind == EstimateKind::Target { Some(r.family(betas.len())?) } else { None };
            let resolutions = match r.get("resolutions").unwrap_or("auto") {
                "auto" => Resolutions::Auto,
                list => Resolutions::List {
                    values: r.list("resolutions", list)?,
                },
            };
            Params::Estimate {
                betas,
                psi,
                kind,
                family,
                depths: parse_depths(r.get("depths").unwrap_or("6:12"))?,
                resolutions,
                budget: r.or("budget", DEFAULT_BUDGET)?,
                tolerance: tolerance.unwrap_or(beta_targets::estimator::crosscheck::DEFAULT_TOLERANCE),
            }
        }
    };
    Ok(ExperimentConfig {
        command,
        seed,
        tolerance,
        out,
        format,
        params,
        warnings,
    })
}

impl Family {
    pub fn scalar(&self) -> ScalarMap {
        self.family.component(0).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("command = estimate\nbetas = 2\npsi = exp:-0.6931\n").unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.format, OutputFormat::Json);
        match cfg.params {
            Params::Estimate { depths, kind, tolerance, .. } => {
                assert_eq!(depths, (6, 12));
                assert_eq!(kind, EstimateKind::Hyperboloid);
                assert_eq!(tolerance, 0.15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn growing_psi_warns() {
        let cfg = parse_config("command = dimension\nbetas = 2\npsi = exp:0.5\n").unwrap();
        assert!(cfg.warnings.iter().any(|w| w.contains("clamp")), "{:?}", cfg.warnings);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("command = hits\nfn_familly = identity\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("fn_familly"));
        assert!(err.to_string().contains("fn_familly"));
    }

    #[test]
    fn json_and_text_agree() {
        let a = parse_raw(r#"{"command": "dimension", "betas": [2, 4], "tau": 0.6931}"#).unwrap();
        let b = parse_raw("command = dimension\nbetas = 2,4\ntau = 0.6931").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_values() {
        assert_eq!(parse_config("command = dimension\nbetas = 2\n").unwrap_err().key.as_deref(), Some("tau"));
        assert_eq!(parse_config("command = dimension\nbetas = 2\npsi = exp:-1,0\n").unwrap_err().key.as_deref(), Some("psi"));
        assert_eq!(parse_config("command = estimate\nbetas = 2\npsi = exp:-1\ndepths = 9:3").unwrap_err().key.as_deref(), Some("depths"));
        assert!(parse_config("betas = 2").is_err());
        assert!(parse_config("command = warp").is_err());
        assert!(parse_config("command dimension").is_err());
    }

    #[test]
    fn formula_aliases() {
        assert_eq!(parse_formula("theorem1").unwrap(), FormulaId::Hyperboloid);
        assert_eq!(parse_formula("single-psi").unwrap(), FormulaId::SinglePsi);
        assert!(parse_formula("lemma").is_err());
    }

    #[test]
    fn words_parse_both_ways() {
        assert_eq!(parse_word("0110").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_word("2,10,0").unwrap(), vec![2, 10, 0]);
    }
}
