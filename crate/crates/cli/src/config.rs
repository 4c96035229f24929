//! Experiment configuration: a versioned JSON file whose fields can be
//! overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub name: String,
    /// Strength of the added L2 regularizer, when any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    /// One of `fixed`, `inv_lambda_t`, `inv_sqrt_t`, `line_search`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrink: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            name: "inv_sqrt_t".into(),
            eta: None,
            c: None,
            shrink: None,
            max_evals: None,
        }
    }
}

fn default_schema() -> u32 {
    CONFIG_SCHEMA
}

fn default_objective() -> ObjectiveConfig {
    ObjectiveConfig {
        name: "squared".into(),
        lambda: None,
    }
}

fn default_learner() -> String {
    "regression_stumps".into()
}

fn default_algorithm() -> String {
    "naive".into()
}

fn default_iterations() -> usize {
    100
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_threshold_eps() -> f64 {
    0.1
}

fn default_threshold_max_fits() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// One of `csv`, `libsvm`, `ranking`; inferred from the file extension
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default = "default_objective")]
    pub objective: ObjectiveConfig,
    #[serde(default = "default_learner")]
    pub learner: String,
    /// One of `naive`, `repeated`, `repeated-threshold`, `residual`.
    #[serde(default = "default_algorithm")]
    pub algorithm: String,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_threshold_eps")]
    pub threshold_eps: f64,
    #[serde(default = "default_threshold_max_fits")]
    pub threshold_max_fits: usize,
    #[serde(default)]
    pub standardize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_curve: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_model: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if config.schema != CONFIG_SCHEMA {
            bail!(
                "unsupported config schema {} (expected {CONFIG_SCHEMA})",
                config.schema
            );
        }
        Ok(config)
    }

    /// Rejects configurations that reference unknown registry entries or
    /// nonsensical parameters before any data is touched.
    pub fn validate(&self) -> Result<()> {
        const OBJECTIVES: [&str; 5] = [
            "squared",
            "hinge",
            "exponential",
            "multiclass_hinge",
            "ranking_hinge",
        ];
        const LEARNERS: [&str; 4] = [
            "regression_stumps",
            "binary_stumps",
            "multiclass_stumps",
            "constant",
        ];
        const ALGORITHMS: [&str; 4] = ["naive", "repeated", "repeated-threshold", "residual"];
        const SCHEDULES: [&str; 4] = ["fixed", "inv_lambda_t", "inv_sqrt_t", "line_search"];

        if !OBJECTIVES.contains(&self.objective.name.as_str()) {
            bail!(
                "unknown objective {:?} (expected one of {OBJECTIVES:?})",
                self.objective.name
            );
        }
        if let Some(lam) = self.objective.lambda {
            if lam.is_nan() || lam <= 0.0 {
                bail!("objective lambda must be positive, got {lam}");
            }
        }
        if !LEARNERS.contains(&self.learner.as_str()) {
            bail!(
                "unknown learner {:?} (expected one of {LEARNERS:?})",
                self.learner
            );
        }
        if !ALGORITHMS.contains(&self.algorithm.as_str()) {
            bail!(
                "unknown algorithm {:?} (expected one of {ALGORITHMS:?})",
                self.algorithm
            );
        }
        if !SCHEDULES.contains(&self.schedule.name.as_str()) {
            bail!(
                "unknown schedule {:?} (expected one of {SCHEDULES:?})",
                self.schedule.name
            );
        }
        if self.iterations < 1 {
            bail!("iterations must be at least 1");
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            bail!(
                "test fraction must lie in [0, 1), got {}",
                self.test_fraction
            );
        }
        Ok(())
    }
}
