use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::HarnessResult;
use crate::output::sha256_file;

/// One simulation inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub n_q: usize,
    pub chaos: f64,
    pub cells: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub realization_id: Option<u64>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub wall_seconds: f64,
    pub notices: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config_hash: config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            runs: Vec::new(),
            wall_seconds: 0.0,
            notices: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn notice(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.notices.push(msg);
    }

    /// Fills the inventory from files under `root`.
    pub fn inventory(&mut self, root: &Path, files: &[std::path::PathBuf]) -> HarnessResult<()> {
        for f in files {
            let rel = f.strip_prefix(root).unwrap_or(f);
            self.outputs.push(OutputFile {
                path: rel.to_string_lossy().into_owned(),
                bytes: std::fs::metadata(f)?.len(),
                sha256: sha256_file(f)?,
            });
        }
        Ok(())
    }
}
