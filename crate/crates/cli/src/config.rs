use std::io::Read;
use std::path::Path;

use p2p_reins::{LinalgError, MarketError, MarketParams, Matrix};
use serde::Deserialize;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid market: {0}")]
    Validation(#[from] MarketError),
    #[error("sigma: {0}")]
    Sigma(LinalgError),
    #[error("unsupported schema_version {0:?} (expected {SCHEMA_VERSION:?})")]
    Schema(String),
    #[error("sweep: {0}")]
    Sweep(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub param: String,
    pub from: f64,
    pub to: f64,
    /// Number of increments; the grid has steps + 1 points.
    pub steps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { param: "gamma_r".into(), from: 0.0, to: 0.029, steps: 29 }
    }
}

impl SweepConfig {
    /// Grid points in ascending order.
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.param != "gamma_r" {
            return Err(ConfigError::Sweep(format!("unsupported parameter {:?}; only gamma_r", self.param)));
        }
        if self.steps == 0 || !(self.from.is_finite() && self.to.is_finite()) || self.from > self.to {
            return Err(ConfigError::Sweep(format!("need from <= to and steps >= 1, got {self:?}")));
        }
        let h = (self.to - self.from) / self.steps as f64;
        Ok((0..=self.steps).map(|k| if k == self.steps { self.to } else { self.from + h * k as f64 }).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub schema_version: String,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub gamma_r: f64,
    #[serde(default)]
    pub jpo2_t: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl MarketConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn params(&self) -> Result<MarketParams, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema(self.schema_version.clone()));
        }
        if self.sigma.len() != self.mu.len() {
            return Err(MarketError::LengthMismatch { field: "sigma", expected: self.mu.len(), actual: self.sigma.len() }.into());
        }
        if let Some((_, row)) = self.sigma.iter().enumerate().find(|(_, r)| r.len() != self.mu.len()) {
            return Err(MarketError::LengthMismatch { field: "sigma row", expected: self.mu.len(), actual: row.len() }.into());
        }
        let sigma = Matrix::from_rows(&self.sigma).map_err(ConfigError::Sigma)?;
        Ok(MarketParams::new(self.mu.clone(), sigma, self.gamma.clone(), self.gamma_r)?)
    }
}

/// Reads a config file; `-` means standard input.
pub fn load_config(path: &Path) -> Result<(MarketConfig, MarketParams), ConfigError> {
    let shown = path.display().to_string();
    let text = if shown == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|source| ConfigError::Io { path: shown, source })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: shown, source })?
    };
    let cfg = MarketConfig::from_json(&text)?;
    let params = cfg.params()?;
    Ok((cfg, params))
}
