//! JSON run configuration shared by the command-line verbs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{FamilyError, MetricFamily, Parity};
use crate::integrals::PhasePoint;
use crate::numerics::Tolerances;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("ParseError: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("UnknownTolerance: no check named {0:?}")]
    UnknownTolerance(String),
    #[error("BadOverride: expected NAME=VALUE, got {0:?}")]
    BadOverride(String),
    #[error("MissingBlock: config has no {0:?} block")]
    MissingBlock(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityName {
    Even,
    Odd,
}

impl From<ParityName> for Parity {
    fn from(p: ParityName) -> Self {
        match p {
            ParityName::Even => Parity::EvenDegree,
            ParityName::Odd => Parity::OddDegree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// `(t, y, P_t, P_y)` at `s = 0`.
    pub init: [f64; 4],
    pub span: f64,
    pub step: f64,
}

impl FlowConfig {
    pub fn initial_point(&self) -> PhasePoint {
        PhasePoint::from_array(self.init)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub parity: ParityName,
    pub n: usize,
    pub masses: Vec<f64>,
    pub signs: Vec<i64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads and parses `path`, then checks the family and tolerance names.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg = Self::from_json(&text)?;
        cfg.family()?;
        cfg.tolerances()?;
        Ok(cfg)
    }

    pub fn family(&self) -> Result<MetricFamily, FamilyError> {
        MetricFamily::new(self.parity.into(), self.n, self.masses.clone(), self.signs.clone())
    }

    /// Defaults with the config's overrides applied.
    pub fn tolerances(&self) -> Result<Tolerances, ConfigError> {
        let mut tol = Tolerances::default();
        for (name, &v) in &self.tolerances {
            if !tol.contains(name) {
                return Err(ConfigError::UnknownTolerance(name.clone()));
            }
            tol.set(name, v);
        }
        Ok(tol)
    }

    /// Applies a `NAME=VALUE` override.
    pub fn override_tolerance(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError::BadOverride(spec.to_string()))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| ConfigError::BadOverride(spec.to_string()))?;
        let name = name.trim();
        if !Tolerances::default().contains(name) {
            return Err(ConfigError::UnknownTolerance(name.to_string()));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }
}
