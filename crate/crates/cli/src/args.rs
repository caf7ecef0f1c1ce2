//! Command-line definitions, params-file merging and sweep syntax.

use std::fmt;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use strohhacker_core::TheoremId;

pub const DEFAULT_SEED: u64 = 1;

/// Bad flags or parameter values; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Parser, Debug)]
#[command(name = "strohhacker", version, about = "Threshold tables, admissibility certificates and implication checks for p-valent functions")]
pub struct Cli {
    /// Output format [default: json].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for corpus generation and the sharpness search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON object whose keys mirror the long flags; flags given on the command line win.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate implication thresholds over a parameter sweep.
    Thresholds(SweepArgs),
    /// Numerically certify the admissibility suprema behind the thresholds.
    Admissible(AdmissibleArgs),
    /// Check implications on a corpus of test functions.
    Verify(VerifyArgs),
    /// Search for functions that bring the conclusion close to its bound.
    Sharpness(SharpnessArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Thresholds(_) => "thresholds",
            Command::Admissible(_) => "admissible",
            Command::Verify(_) => "verify",
            Command::Sharpness(_) => "sharpness",
        }
    }
}

/// Sweep lists accept `1,2,3`, integer ranges `1..4` (inclusive) and real
/// ranges `0.1..0.9:0.1`.
#[derive(Args, Debug, Default, Clone)]
pub struct SweepArgs {
    /// Theorem ids (`T22,T31`) or `all`.
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    /// Fixed second coefficient.
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Generic name for the theorem's `beta` or `gamma` argument.
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Angular samples per circle (a power of two is fastest).
    #[arg(long)]
    pub angles: Option<usize>,
    /// Radii `1 - 2^-j` for `j = 1..=steps`.
    #[arg(long)]
    pub radial_steps: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct AdmissibleArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Write the boundary curve `rho,sigma,re_psi` of the single requested problem here.
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// `default`, `monomials`, or a path to a corpus manifest JSON.
    #[arg(long)]
    pub corpus: Option<String>,
    /// Save the corpus manifest used by the run.
    #[arg(long)]
    pub corpus_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of free tail coefficients.
    #[arg(long)]
    pub free_degrees: Option<usize>,
    /// Function evaluations per case.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Start from a dilated half-plane kernel instead of the monomial.
    #[arg(long)]
    pub warm_start: bool,
}

/// Values loaded from `--params`.
#[derive(Debug, Default)]
pub struct Params(Map<String, Value>);

impl Params {
    pub fn load(path: Option<&PathBuf>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(Self(map)),
            Ok(_) => usage(format!("{}: params file must hold a JSON object", path.display())),
            Err(e) => usage(format!("{}: {e}", path.display())),
        }
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key).or_else(|| self.0.get(&key.replace('_', "-")))
    }

    /// The value as sweep text: arrays are joined with commas.
    pub fn text(&self, key: &str) -> Option<String> {
        fn scalar(v: &Value) -> String {
            match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }
        }
        self.get(key).map(|v| match v {
            Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
            other => scalar(other),
        })
    }

    pub fn resolve(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.text(key))
    }

    pub fn number<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.text(key) {
            None => Ok(None),
            Some(s) => match s.parse() {
                Ok(v) => Ok(Some(v)),
                Err(_) => usage(format!("params: {key} = {s:?} is not a valid value")),
            },
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.get(key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(v) => usage(format!("params: {key} = {v} is not a boolean")),
        }
    }
}

/// Sweep lists after merging flags with the params file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sweep {
    pub theorems: Option<Vec<TheoremId>>,
    pub p: Option<Vec<u32>>,
    pub b: Vec<f64>,
    pub level: Vec<f64>,
}

impl Sweep {
    pub fn resolve(args: &SweepArgs, params: &Params) -> Result<Self> {
        let theorems = params
            .resolve(&args.theorem, "theorem")
            .map(|s| parse_theorems(&s))
            .transpose()?;
        let p = params.resolve(&args.p, "p").map(|s| parse_u32_list(&s)).transpose()?;
        let b = params.resolve(&args.b, "b").map(|s| parse_f64_list(&s)).transpose()?;
        let mut level = Vec::new();
        for key in ["beta", "gamma", "level"] {
            let flag = match key {
                "beta" => &args.beta,
                "gamma" => &args.gamma,
                _ => &args.level,
            };
            if let Some(s) = params.resolve(flag, key) {
                level.extend(parse_f64_list(&s)?);
            }
        }
        Ok(Self {
            theorems,
            p,
            b: b.unwrap_or_default(),
            level,
        })
    }
}

pub fn parse_theorems(s: &str) -> Result<Vec<TheoremId>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(TheoremId::IMPLICATIONS.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<TheoremId>().or_else(|_| usage(format!("unknown theorem {t:?}"))))
        .collect()
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let (Ok(lo), Ok(hi)) = (lo.trim().parse::<u32>(), hi.trim().parse::<u32>()) else {
                return usage(format!("bad integer range {part:?}"));
            };
            out.extend(lo..=hi);
        } else {
            match part.parse() {
                Ok(v) => out.push(v),
                Err(_) => return usage(format!("bad integer {part:?}")),
            }
        }
    }
    Ok(out)
}

/// Range points `lo + i step` are rounded to 12 decimals so that
/// `0.1..0.3:0.1` yields `0.3` rather than `0.30000000000000004`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((range, step)) = part.split_once(':') {
            let Some((lo, hi)) = range.split_once("..") else {
                return usage(format!("bad range {part:?}, expected lo..hi:step"));
            };
            let (Ok(lo), Ok(hi), Ok(step)) = (lo.trim().parse::<f64>(), hi.trim().parse::<f64>(), step.trim().parse::<f64>())
            else {
                return usage(format!("bad range {part:?}"));
            };
            if !(step > 0.0 && lo.is_finite() && hi.is_finite()) {
                return usage(format!("bad range {part:?}"));
            }
            let count = ((hi - lo) / step + 1e-9).floor();
            if count >= 0.0 {
                if count > 1e6 {
                    return usage(format!("range {part:?} is too long"));
                }
                for i in 0..=count as u64 {
                    out.push(((lo + i as f64 * step) * 1e12).round() / 1e12);
                }
            }
        } else {
            match part.parse() {
                Ok(v) => out.push(v),
                Err(_) => return usage(format!("bad number {part:?}")),
            }
        }
    }
    Ok(out)
}
