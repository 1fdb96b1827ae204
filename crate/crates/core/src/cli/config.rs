//! Experiment configuration: one JSON document, unknown keys rejected.

use crate::differentials::Bump;
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Keys accepted in `outputs`, each overriding a file name inside the output directory.
pub const OUTPUT_KEYS: [&str; 8] = [
    "certificate",
    "flatness",
    "manifest",
    "mesh",
    "report",
    "scan",
    "states",
    "trajectory",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Geodesic,
    Vortex,
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_surface")]
    pub surface: String,
    pub mode: ModeName,
    /// Degree of the differential; ignored outside vortex mode.
    #[serde(default)]
    pub m: u32,
    #[serde(default)]
    pub seed_coefficients: Vec<[f64; 2]>,
    /// Maximal word length of the Poincaré series; the per-degree default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub bump_spec: Vec<Bump>,
    #[serde(default = "default_mesh_h")]
    pub mesh_h: f64,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t: f64,
    #[serde(default = "default_n_states")]
    pub n_states: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
}

fn default_surface() -> String {
    "bolza".into()
}

fn default_mesh_h() -> f64 {
    0.05
}

fn default_solver_tol() -> f64 {
    1e-8
}

fn default_dt() -> f64 {
    1e-2
}

fn default_t() -> f64 {
    1000.0
}

fn default_n_states() -> usize {
    20
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LabError::Config(format!("{name} must be positive and finite, got {value}")))
    }
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical form: sorted keys, defaults written out.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.surface != "bolza" {
            return Err(LabError::Config(format!("unsupported surface {:?}; only \"bolza\" is available", self.surface)));
        }
        positive("dt", self.dt)?;
        positive("T", self.t)?;
        positive("mesh_h", self.mesh_h)?;
        positive("solver_tol", self.solver_tol)?;
        if self.n_states == 0 {
            return Err(LabError::Config("n_states must be at least 1".into()));
        }
        if self.mode == ModeName::Vortex {
            if self.m < 2 {
                return Err(LabError::Config(format!(
                    "vortex mode needs degree m >= 2, got m = {}; degree 1 is excluded since a 1-form differential reduces to the gaussian family (use mode \"gaussian\")",
                    self.m
                )));
            }
            if self.seed_coefficients.iter().flatten().any(|c| !c.is_finite()) {
                return Err(LabError::Config("seed_coefficients must be finite".into()));
            }
        }
        for bump in &self.bump_spec {
            positive("bump width", bump.width)?;
            if !bump.amplitude.is_finite() || bump.center.iter().any(|c| !c.is_finite()) {
                return Err(LabError::Config("bump centre and amplitude must be finite".into()));
            }
        }
        if let Some(key) = self.outputs.keys().find(|k| !OUTPUT_KEYS.contains(&k.as_str())) {
            return Err(LabError::Config(format!("unknown output key {key:?}; expected one of {OUTPUT_KEYS:?}")));
        }
        if let Some((key, _)) = self.outputs.iter().find(|(_, v)| v.is_empty() || v.contains(['/', '\\'])) {
            return Err(LabError::Config(format!("output {key:?} must be a plain file name")));
        }
        Ok(())
    }

    /// File name for output `key`.
    pub fn output_name(&self, key: &str, default: &str) -> String {
        self.outputs.get(key).cloned().unwrap_or_else(|| default.to_string())
    }
}
