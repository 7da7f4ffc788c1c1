use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{sha256_hex, FileDigest};

/// Outcome of one acceptance criterion or identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Seeds (or instance indices) of counterexamples, if any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<u64>,
}

impl CriterionResult {
    pub fn new(id: &str, name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { id: id.into(), name: name.into(), pass, detail: detail.into(), counterexamples: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub artifact_version: String,
    pub threads: usize,
    pub wall_time_seconds: f64,
    /// How per-sample seeds are formed from the master seed.
    pub seed_rule: String,
    pub criteria: Vec<CriterionResult>,
    pub files: Vec<FileDigest>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl RunManifest {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    /// Files whose on-disk digest differs from the recorded one.
    pub fn stale_files(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            let p = dir.join(&f.path);
            let bytes = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
            if sha256_hex(&bytes) != f.sha256 {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }
}
