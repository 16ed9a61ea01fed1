//! TOML run configuration. Every section is optional; command-line flags
//! override the file.

use std::path::{Path, PathBuf};

use fluxindex::lattice::{BandSelector, Hop, ModelPreset, Patch};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub index_pair: IndexPairConfig,
    #[serde(default)]
    pub correspondence: CorrespondenceConfig,
    #[serde(default)]
    pub flux_sweep: FluxSweepConfig,
    #[serde(default)]
    pub chern: ChernConfig,
    #[serde(default)]
    pub stacked_index: StackedIndexConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        match config.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::Config(format!(
                    "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => return Err(CliError::Config("missing schema_version".into())),
        }
        Ok(config)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// `hofstadter`, `atomic` or `custom`.
    pub preset: String,
    pub alpha: f64,
    pub hopping: f64,
    pub energy: f64,
    pub n_internal: usize,
    pub hops: Vec<Hop>,
    pub width: usize,
    pub height: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            preset: "hofstadter".into(),
            alpha: 1.0 / 3.0,
            hopping: 1.0,
            energy: 1.0,
            n_internal: 1,
            hops: Vec::new(),
            width: 30,
            height: 30,
        }
    }
}

impl ModelConfig {
    pub fn preset(&self) -> Result<ModelPreset, CliError> {
        match self.preset.as_str() {
            "hofstadter" => Ok(ModelPreset::Hofstadter {
                alpha: self.alpha,
                hopping: self.hopping,
            }),
            "atomic" => Ok(ModelPreset::Atomic {
                energy: self.energy,
            }),
            "custom" => Ok(ModelPreset::Custom {
                n_internal: self.n_internal,
                hops: self.hops.clone(),
            }),
            other => Err(CliError::Config(format!(
                "unknown preset {other:?}; expected hofstadter, atomic or custom"
            ))),
        }
    }

    pub fn patch(&self) -> Result<Patch, CliError> {
        Patch::centered(self.width, self.height).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexPairConfig {
    /// `shift`, `dimer`, `random` or `files`.
    pub example: String,
    pub sites: usize,
    pub beta: f64,
    pub dimers: usize,
    pub dim: usize,
    pub p: Option<PathBuf>,
    pub q: Option<PathBuf>,
}

impl Default for IndexPairConfig {
    fn default() -> Self {
        Self {
            example: "shift".into(),
            sites: 41,
            beta: 0.4,
            dimers: 200,
            dim: 64,
            p: None,
            q: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrespondenceConfig {
    /// `shift`, `random` or `equal`.
    pub example: String,
    pub modes: usize,
    pub trials: usize,
}

impl Default for CorrespondenceConfig {
    fn default() -> Self {
        Self {
            example: "random".into(),
            modes: 8,
            trials: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxSweepConfig {
    pub mu: f64,
    pub cells: usize,
    pub window: usize,
    pub max_bisections: usize,
    pub probe_radius: i64,
    pub initial_steps: usize,
    pub max_halvings: usize,
    pub step_tol: f64,
    /// Lowest bands for the Chern cross-check; 0 skips it.
    pub chern_bands: usize,
    /// Largest accepted `|local deficiency - local flow|`.
    pub deficiency_tol: f64,
}

impl Default for FluxSweepConfig {
    fn default() -> Self {
        Self {
            mu: -1.366,
            cells: 64,
            window: 6,
            max_bisections: 12,
            probe_radius: 7,
            initial_steps: 16,
            max_halvings: 6,
            step_tol: 1e-3,
            chern_bands: 1,
            deficiency_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChernConfig {
    /// Selected bands `start..end`.
    pub start: usize,
    pub end: usize,
    pub grid: usize,
    pub max_doublings: usize,
}

impl Default for ChernConfig {
    fn default() -> Self {
        Self {
            start: 0,
            end: 1,
            grid: 12,
            max_doublings: 3,
        }
    }
}

impl ChernConfig {
    pub fn selector(&self) -> BandSelector {
        BandSelector::Range {
            start: self.start,
            end: self.end,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct StackedIndexConfig {
    /// `flux` (quasi-adiabatic pair on the model patch) or `planted`.
    pub example: String,
    /// Fermi level; the midpoint of the largest spectral gap when absent.
    pub mu: Option<f64>,
    /// Patch of the flux pair; the stacked Fock space has twice as many
    /// modes as sites, so it must stay small.
    pub width: usize,
    pub height: usize,
    pub modes: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Default for StackedIndexConfig {
    fn default() -> Self {
        Self {
            example: "flux".into(),
            mu: None,
            width: 3,
            height: 3,
            modes: 9,
            n_plus: 1,
            n_minus: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annotated_example_parses() {
        let text = include_str!("../configs/run.toml");
        let c: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(c.schema_version, Some(SCHEMA_VERSION));
        assert!(matches!(c.model.preset().unwrap(), ModelPreset::Hofstadter { .. }));
        assert_eq!(c.flux_sweep.cells, 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<RunConfig, _> = toml::from_str("schema_version = 1\n[flux_sweep]\ncels = 3\n");
        assert!(r.is_err());
    }
}
