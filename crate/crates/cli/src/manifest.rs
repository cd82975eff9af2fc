//! Run manifests: config hash, per-task status and artifact paths.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::raw::write_atomic;
use crate::tasks::Task;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    pub status: TaskStatus,
    /// Raw file, relative to the output directory.
    pub path: String,
    pub seed: u64,
    pub seconds: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// In canonical task order.
    pub tasks: Vec<TaskRecord>,
    /// Wall time summed over invocations.
    pub elapsed_seconds: f64,
    /// Aggregated tables, relative to the output directory.
    #[serde(default)]
    pub artifacts: Vec<String>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    Sha256::digest(cfg.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(cfg: &ExperimentConfig, tasks: &[Task]) -> Self {
        Self {
            config_hash: config_hash(cfg),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            tasks: tasks
                .iter()
                .map(|t| TaskRecord {
                    id: t.id.clone(),
                    status: TaskStatus::Pending,
                    path: t.raw_path(),
                    seed: t.seed,
                    seconds: None,
                    error: None,
                })
                .collect(),
            elapsed_seconds: 0.0,
            artifacts: Vec::new(),
        }
    }

    pub fn path(out: &Path) -> PathBuf {
        out.join(MANIFEST_FILE)
    }

    pub fn load(out: &Path) -> Result<Option<Self>, CliError> {
        let path = Self::path(out);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map(Some).map_err(|e| CliError::Manifest { path, reason: e.to_string() })
    }

    pub fn save(&self, out: &Path) -> Result<(), CliError> {
        let bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        write_atomic(&Self::path(out), &bytes)
    }

    pub fn count(&self, status: TaskStatus) -> usize {
        self.tasks.iter().filter(|t| t.status == status).count()
    }

    pub fn is_complete(&self) -> bool {
        self.count(TaskStatus::Done) == self.tasks.len()
    }
}
