// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use qsl_core::control::OptimizerConfig;
use qsl_core::models::ModelSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Only schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Directory receiving CSV and JSON artifacts.
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub closed_compare: ClosedCompareSpec,
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySpec {
    /// Sample points per series, beyond `t = 0`.
    pub samples: usize,
    /// Also emit the optimized trajectory at the minimal time found.
    pub controlled: bool,
    /// Uncontrolled series length; defaults to the first-passage time.
    pub duration: Option<f64>,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self { samples: 200, controlled: true, duration: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosedCompareSpec {
    /// Random instances per dimension.
    pub instances: usize,
    pub dims: Vec<usize>,
}

impl Default for ClosedCompareSpec {
    fn default() -> Self {
        Self { instances: 100, dims: vec![2, 4, 8] }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.optimizer.validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep.values is empty".into()));
            }
            if let Some(v) = sweep.values.iter().find(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("sweep value {v} is not finite")));
            }
            self.model.with_parameter(&sweep.parameter, sweep.values[0])?;
        }
        if self.trajectory.samples == 0 {
            return Err(CliError::Config("trajectory.samples must be positive".into()));
        }
        if let Some(t) = self.trajectory.duration {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("trajectory.duration {t} must be positive")));
            }
        }
        if self.closed_compare.dims.iter().any(|&d| d < 2) {
            return Err(CliError::Config("closed_compare.dims must be at least 2".into()));
        }
        Ok(())
    }

    /// Sweep points `(parameter, value, model)` in list order.
    pub fn sweep_points(&self) -> CliResult<Vec<(String, f64, ModelSpec)>> {
        let sweep = self.sweep.as_ref().ok_or_else(|| CliError::Config("config has no `sweep` section".into()))?;
        sweep
            .values
            .iter()
            .map(|&v| Ok((sweep.parameter.clone(), v, self.model.with_parameter(&sweep.parameter, v)?)))
            .collect()
    }
}
