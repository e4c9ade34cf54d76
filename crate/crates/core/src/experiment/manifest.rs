//! Run manifest: everything needed to replay a run bit for bit.
//!
//! Schema `bdsde-manifest/1` (JSON):
//!
//! | key           | content                                                        |
//! |---------------|----------------------------------------------------------------|
//! | `schema`      | `"bdsde-manifest/1"`                                           |
//! | `version`     | crate version that wrote it                                    |
//! | `revision`    | source revision, `unknown` outside a git checkout              |
//! | `verb`        | `run`, `schedule` or `compare-bsde`                            |
//! | `config`      | the fully resolved [`ExperimentConfig`](super::ExperimentConfig) |
//! | `settings`    | per setting: `(j, path, N, M, δ)`, the `B` seed, every `W` seed, occupancy per step and Picard residuals of repetition 0 |
//! | `outputs`     | every CSV written, with the SHA-256 of its body (header comment excluded) |
//! | `failures`    | failed repetitions as `j=<j> rep=<r>: <error>`                 |
//! | `loglog_slope`| slope of mean error against `h`, when an oracle exists and there are several step sizes |
//! | `log_clamps`  | how often `x` was clamped before `log x` in the noise coefficient |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Verb};
use crate::error::{Error, Result};
use crate::regression::OccupancyStats;

pub const MANIFEST_SCHEMA: &str = "bdsde-manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingRecord {
    pub j: usize,
    pub path: usize,
    pub steps: usize,
    pub samples: usize,
    pub delta: f64,
    pub b_seed: u64,
    pub w_seeds: Vec<u64>,
    /// Occupancy of the step `n` basis, `n = 0..=N`, repetition 0.
    pub occupancy: Vec<OccupancyStats>,
    /// Picard gaps per step, repetition 0.
    pub picard_residuals: Vec<Vec<f64>>,
    /// Basis lookups that fell outside the domain, repetition 0.
    pub basis_clamps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub body_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub version: String,
    pub revision: String,
    pub verb: Verb,
    pub config: ExperimentConfig,
    pub conforming: bool,
    pub settings: Vec<SettingRecord>,
    pub outputs: Vec<OutputRecord>,
    pub failures: Vec<String>,
    pub loglog_slope: Option<f64>,
    pub log_clamps: u64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(Error::ConfigField {
                field: "schema".into(),
                message: format!(
                    "unsupported manifest schema `{}`, expected `{MANIFEST_SCHEMA}`",
                    manifest.schema
                ),
            });
        }
        Ok(manifest)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}
