//! Sweep configuration and edge-probability grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reconstruct::Algorithm;
use crate::witness::{FinderKind, DEFAULT_BUDGET};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
}

/// Threshold functions `f(n, r)` that multiplier grids scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    /// `n^{-(2r+1)/(2r)}`
    FirstTransition,
    /// `log n / (r n)`
    LogOverRn,
    /// `sqrt(log n / (25 n))`
    #[serde(rename = "sqrt-log-over-25n")]
    SqrtLogOver25n,
    /// `n^{-3/4} log^{1/4} n`
    ThreeQuarter,
    /// `log² n / (n (log log n)³)`
    LogSquared,
}

impl Threshold {
    pub fn eval(self, n: usize, r: usize) -> f64 {
        let nf = n as f64;
        let ln = nf.ln();
        let rf = r.max(1) as f64;
        match self {
            Threshold::FirstTransition => nf.powf(-(2.0 * rf + 1.0) / (2.0 * rf)),
            Threshold::LogOverRn => ln / (rf * nf),
            Threshold::SqrtLogOver25n => (ln / (25.0 * nf)).sqrt(),
            Threshold::ThreeQuarter => nf.powf(-0.75) * ln.powf(0.25),
            Threshold::LogSquared => ln * ln / (nf * ln.ln().powi(3)),
        }
    }
}

/// How the edge probabilities of a sweep are given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PSpec {
    /// Literal probabilities.
    Explicit { values: Vec<f64> },
    /// `p = n^{-a}` for each `a`.
    Exponent { values: Vec<f64> },
    /// `p = c f(n, r)` for each multiplier `c`.
    Multiplier { function: Threshold, values: Vec<f64> },
}

impl PSpec {
    pub fn len(&self) -> usize {
        match self {
            PSpec::Explicit { values } | PSpec::Exponent { values } | PSpec::Multiplier { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th probability for graphs on `n` vertices at radius `r`.
    pub fn p(&self, i: usize, n: usize, r: usize) -> f64 {
        match self {
            PSpec::Explicit { values } => values[i],
            PSpec::Exponent { values } => (n as f64).powf(-values[i]),
            PSpec::Multiplier { function, values } => values[i] * function.eval(n, r),
        }
    }
}

/// What each trial does with its sampled graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    /// Rebuild from the `r`-balls with the named algorithm.
    Reconstruct { algorithm: String },
    /// Search for a witness with the named finder.
    Witness { finder: FinderKind },
}

impl Mode {
    pub fn algorithm(&self) -> Option<Algorithm> {
        match self {
            Mode::Reconstruct { algorithm } => algorithm.parse().ok(),
            Mode::Witness { .. } => None,
        }
    }

    /// Short label used in the CSV `mode` column.
    pub fn label(&self) -> String {
        match self {
            Mode::Reconstruct { algorithm } => format!("reconstruct:{algorithm}"),
            Mode::Witness { finder } => format!("witness:{finder}"),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Mode {
    type Err = String;

    /// `reconstruct:<algorithm>` or `witness:<finder>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some(("reconstruct", a)) => {
                a.parse::<Algorithm>()?;
                Ok(Mode::Reconstruct { algorithm: a.to_string() })
            }
            Some(("witness", f)) => Ok(Mode::Witness { finder: f.parse()? }),
            _ => Err(format!("mode {s:?} must be reconstruct:<algorithm> or witness:<finder>")),
        }
    }
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_timeout() -> f64 {
    60.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub p: PSpec,
    pub r: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub mode: Mode,
    /// Candidate budget of the sampling finders.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Whole-graph isomorphism cross-check on witnesses up to this many vertices.
    #[serde(default)]
    pub exact_cap: usize,
    /// Trials running longer than this many seconds are counted as
    /// inconsistent and flagged as timed out.
    #[serde(default = "default_timeout")]
    pub trial_timeout_secs: f64,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() || self.p.is_empty() {
            return bad("n_values and p values must be non-empty".into());
        }
        if let Mode::Reconstruct { algorithm } = &self.mode {
            if let Err(e) = algorithm.parse::<Algorithm>() {
                return bad(e);
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        for &n in &self.n_values {
            for i in 0..self.p.len() {
                let p = self.p.p(i, n, self.r);
                if !(p > 0.0 && p < 1.0) {
                    return bad(format!("p = {p} for n = {n} is outside (0, 1)"));
                }
            }
        }
        Ok(())
    }
}
