//! JSON run configuration. Every field has a default, so `{}` is a complete
//! configuration; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{AfosmcParams, BaselineParams, CompensatorParams};
use crate::harness::{CaseId, Reference, RunOptions, Scenario};
use crate::plant::PlantParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryUnit {
    Samples,
    Seconds,
}

/// Operator memory with an explicit unit. `n` samples means n·step seconds,
/// i.e. windows of n + 1 samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryLength {
    pub value: f64,
    pub unit: MemoryUnit,
}

impl Default for MemoryLength {
    fn default() -> Self {
        Self {
            value: 50.0,
            unit: MemoryUnit::Seconds,
        }
    }
}

impl MemoryLength {
    pub fn seconds(&self, step: f64) -> f64 {
        match self.unit {
            MemoryUnit::Seconds => self.value,
            MemoryUnit::Samples => self.value * step,
        }
    }
}

/// Sliding-mode gains; the fractional order and memory live at the top level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AfosmcGains {
    pub lambda: f64,
    pub k_p: f64,
    pub k_s: f64,
    pub l_bar: f64,
    pub k1: f64,
    pub epsilon0: f64,
    pub beta0: f64,
    pub beta_max: f64,
    pub epsilon_floor: f64,
}

impl Default for AfosmcGains {
    fn default() -> Self {
        let p = AfosmcParams::default();
        Self {
            lambda: p.lambda,
            k_p: p.k_p,
            k_s: p.k_s,
            l_bar: p.l_bar,
            k1: p.k1,
            epsilon0: p.epsilon0,
            beta0: p.beta0,
            beta_max: p.beta_max,
            epsilon_floor: p.epsilon_floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Memory lengths to compare against full memory, seconds.
    pub lengths: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lengths: vec![0.05, 0.1, 0.5, 1.0, 2.0, 5.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub trace: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub plant: PlantParams,
    /// Fractional order of the sliding surface.
    pub alpha: f64,
    pub memory: MemoryLength,
    pub afosmc: AfosmcGains,
    pub compensator: CompensatorParams,
    pub baseline: BaselineParams,
    pub run: RunOptions,
    /// Reference used by `run` and `sweep-memory`.
    pub reference: Reference,
    /// Columns of the comparison table.
    pub table_references: Vec<Reference>,
    /// Start of the metric window, s; defaults to one reference period.
    pub settle_skip: Option<f64>,
    pub sweep: SweepConfig,
    pub output: OutputPaths,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            plant: PlantParams::default(),
            alpha: 0.5,
            memory: MemoryLength::default(),
            afosmc: AfosmcGains::default(),
            compensator: CompensatorParams::default(),
            baseline: BaselineParams::default(),
            run: RunOptions::default(),
            reference: Reference::sine(1.0, 1.0, 5.0),
            table_references: [1.0, 5.0, 10.0]
                .into_iter()
                .map(|f| Reference::sine(f, 1.0, 5.0))
                .collect(),
            settle_skip: None,
            sweep: SweepConfig::default(),
            output: OutputPaths::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn afosmc_params(&self) -> AfosmcParams {
        let g = &self.afosmc;
        AfosmcParams {
            lambda: g.lambda,
            alpha: self.alpha,
            k_p: g.k_p,
            k_s: g.k_s,
            l_bar: g.l_bar,
            k1: g.k1,
            epsilon0: g.epsilon0,
            beta0: g.beta0,
            beta_max: g.beta_max,
            memory_l: self.memory.seconds(self.run.step),
            epsilon_floor: g.epsilon_floor,
        }
    }

    pub fn scenario(&self, case: CaseId, reference: Reference) -> Scenario {
        Scenario {
            case,
            reference,
            plant: self.plant,
            afosmc: self.afosmc_params(),
            compensator: self.compensator,
            baseline: self.baseline,
            options: self.run,
        }
    }

    /// Metric window start for `reference`.
    pub fn settle_skip_for(&self, reference: &Reference) -> f64 {
        self.settle_skip.unwrap_or_else(|| reference.period())
    }

    /// Checks every numeric field against the invariants of the type it feeds.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.plant.validate().map_err(|e| invalid(&e))?;
        self.run.validate().map_err(|e| invalid(&e))?;
        if !(self.memory.value.is_finite() && self.memory.value > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "memory length must be positive, got {}",
                self.memory.value
            )));
        }
        self.afosmc_params().validate().map_err(|e| invalid(&e))?;
        self.compensator.validate().map_err(|e| invalid(&e))?;
        self.baseline.validate().map_err(|e| invalid(&e))?;
        self.reference.validate().map_err(|e| invalid(&e))?;
        for r in &self.table_references {
            r.validate().map_err(|e| invalid(&e))?;
        }
        for r in std::iter::once(&self.reference).chain(&self.table_references) {
            let skip = self.settle_skip_for(r);
            if !(skip.is_finite() && skip >= 0.0 && skip < r.duration) {
                return Err(ConfigError::Invalid(format!(
                    "settle_skip {skip} s must lie in [0, {}) for the {} reference",
                    r.duration,
                    r.label()
                )));
            }
        }
        for &l in &self.sweep.lengths {
            if !(l.is_finite() && l > 0.0) {
                return Err(ConfigError::Invalid(format!("sweep length must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default() {
        let cfg = Config::from_json("{}").unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.afosmc_params().memory_l, 50.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(Config::from_json(r#"{"alhpa": 0.4}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(
            Config::from_json(r#"{"plant": {"m_bar": 1.0, "mass": 2}}"#),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn zero_mass_rejected() {
        assert!(matches!(
            Config::from_json(r#"{"plant": {"m_bar": 0.0}}"#),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn memory_units() {
        let cfg = Config::from_json(r#"{"memory": {"value": 50, "unit": "samples"}}"#).unwrap();
        assert!((cfg.afosmc_params().memory_l - 0.05).abs() < 1e-15);
    }

    #[test]
    fn settle_skip_must_fit() {
        assert!(Config::from_json(r#"{"settle_skip": 6.0}"#).is_err());
        assert!(Config::from_json(r#"{"settle_skip": 0.0}"#).is_ok());
    }

    #[test]
    fn round_trip() {
        let cfg = Config::default();
        assert_eq!(Config::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
