//! Experiment runner for the `xxladder` library.
//!
//! A run expands a config into (parameter point, realization) tasks, executes them
//! on a worker pool, writes one raw file per task and aggregates the ensemble into
//! CSV tables. Every number is fixed by the config and its master seed, and an
//! interrupted run resumes from its manifest.

pub mod aggregate;
pub mod config;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod raw;
pub mod runner;
pub mod tasks;

pub use aggregate::{aggregate, compute_tables, Stats, Tables};
pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use error::CliError;
pub use manifest::{RunManifest, TaskStatus};
pub use plot::plot_data;
pub use runner::{run, RunOptions};
