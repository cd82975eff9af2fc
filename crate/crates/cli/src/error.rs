use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    /// A guardrail refused the run (for example L = 8 without `--allow-large`).
    #[error("{0}")]
    Guard(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("raw file {path}: {reason}")]
    Raw { path: PathBuf, reason: String },

    #[error("missing raw file {0}")]
    MissingRaw(PathBuf),

    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("{failed} of {total} tasks failed; see the manifest")]
    Partial { failed: usize, total: usize },

    #[error(transparent)]
    Core(#[from] xxladder::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// 2 for configuration problems, 3 for partial failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Guard(_) => 2,
            Self::Partial { .. } => 3,
            _ => 1,
        }
    }
}
