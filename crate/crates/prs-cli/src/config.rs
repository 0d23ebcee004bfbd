//! Sweep configuration: a JSON document describing a grid over log-density
//! exponents, sizes, trial counts, and algorithms.

use crate::trial::Algorithm;
use serde::{Deserialize, Serialize};
use std::fmt;

/// An inclusive exponent range sampled at `steps` evenly spaced points
/// (`steps = 1` takes `min` alone).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ExpRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ExpRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// The sweep grid: `(alpha, beta, gamma)` exponent ranges, instance sizes,
/// trials per cell, algorithms, and an optional base seed (the `--seed` flag
/// overrides it; one of the two must be present).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub alpha: ExpRange,
    pub beta: ExpRange,
    pub gamma: ExpRange,
    pub n: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, range) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
        ] {
            if range.steps < 1 {
                return Err(ConfigError(format!("{name}.steps must be at least 1")));
            }
            if range.min.is_nan() || range.max.is_nan() || range.min > range.max {
                return Err(ConfigError(format!(
                    "{name}.min must not exceed {name}.max"
                )));
            }
            if !(range.min > 0.0 && range.max < 1.0) {
                return Err(ConfigError(format!(
                    "{name} exponents must lie in (0, 1), got [{}, {}]",
                    range.min, range.max
                )));
            }
        }
        if self.n.is_empty() {
            return Err(ConfigError("n list must not be empty".into()));
        }
        if self.trials < 1 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(ConfigError("algorithms list must not be empty".into()));
        }
        for name in &self.algorithms {
            Algorithm::parse(name).map_err(ConfigError)?;
        }
        Ok(())
    }

    pub fn parsed_algorithms(&self) -> Vec<Algorithm> {
        self.algorithms
            .iter()
            .map(|s| Algorithm::parse(s).expect("validated"))
            .collect()
    }
}

/// FNV-1a 64-bit hash of the canonical config encoding, for reproducibility
/// audits in output headers.
pub fn config_hash(config: &SweepConfig) -> u64 {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
