use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use twistor_core::repmat::{irreducible_dimension, MAX_RANK, MIN_RANK};

/// Tolerance for checks backed by exact or integer algebra.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Tolerance for floating matrix identities.
pub const MATRIX_TOLERANCE: f64 = 1e-9;
/// Tolerance for finite-difference checks.
pub const FINITE_DIFFERENCE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma,
    Representation,
    Fibre,
    Curvature,
    Integrability,
    Kaehler,
    NearlyKaehler,
    FlatGlobal,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lemma,
        Suite::Representation,
        Suite::Fibre,
        Suite::Curvature,
        Suite::Integrability,
        Suite::Kaehler,
        Suite::NearlyKaehler,
        Suite::FlatGlobal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma => "lemma",
            Suite::Representation => "representation",
            Suite::Fibre => "fibre",
            Suite::Curvature => "curvature",
            Suite::Integrability => "integrability",
            Suite::Kaehler => "kaehler",
            Suite::NearlyKaehler => "nearly-kaehler",
            Suite::FlatGlobal => "flat-global",
        }
    }

    /// Suites whose identities only hold for `r > 4`, `n ≠ 8`.
    pub fn is_theorem(self) -> bool {
        matches!(self, Suite::Integrability | Suite::Kaehler | Suite::NearlyKaehler)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(ConfigError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("rank {0} is outside {MIN_RANK}..={MAX_RANK}")]
    Rank(usize),
    #[error("multiplicity must be at least 1")]
    Multiplicity,
    #[error("κ must be finite")]
    Kappa,
    #[error("samples must be at least 1")]
    Samples,
    #[error("t-values must be finite and positive, got {0}")]
    TValue(f64),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("unknown format '{0}' (expected text, json or csv)")]
    UnknownFormat(String),
    #[error("malformed tolerance '{0}' (expected <suite>=<positive number>)")]
    Tolerance(String),
}

/// Parses `<suite>=<value>`.
pub fn parse_tolerance(spec: &str) -> Result<(Suite, f64), ConfigError> {
    let bad = || ConfigError::Tolerance(spec.to_string());
    let (name, value) = spec.split_once('=').ok_or_else(bad)?;
    let suite = name.trim().parse::<Suite>()?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !(value.is_finite() && value > 0.0) {
        return Err(bad());
    }
    Ok((suite, value))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub rank: usize,
    pub multiplicity: usize,
    pub kappa: f64,
    pub t_values: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    /// Per-suite overrides of every adjustable row tolerance.
    pub tolerances: BTreeMap<Suite, f64>,
    pub suites: Vec<Suite>,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Include wall-clock timings in serialized reports.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rank: 9,
            multiplicity: 1,
            kappa: 1.0,
            t_values: vec![1.0, 0.5],
            seed: 0,
            samples: 200,
            tolerances: BTreeMap::new(),
            suites: Suite::ALL.to_vec(),
            format: Format::Text,
            output: None,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(MIN_RANK..=MAX_RANK).contains(&self.rank) {
            return Err(ConfigError::Rank(self.rank));
        }
        if self.multiplicity == 0 {
            return Err(ConfigError::Multiplicity);
        }
        if !self.kappa.is_finite() {
            return Err(ConfigError::Kappa);
        }
        if self.samples == 0 {
            return Err(ConfigError::Samples);
        }
        if let Some(&t) = self.t_values.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(ConfigError::TValue(t));
        }
        Ok(())
    }

    /// `n = N0(r) · m`.
    pub fn dimension(&self) -> usize {
        irreducible_dimension(self.rank).unwrap_or(0) * self.multiplicity
    }

    pub fn tolerance_override(&self, suite: Suite) -> Option<f64> {
        self.tolerances.get(&suite).copied()
    }
}
