//! Executes the tasks of a config on a bounded worker pool.

use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;

use crate::aggregate;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::manifest::{config_hash, RunManifest, TaskStatus};
use crate::raw::{write_atomic, RawFile};
use crate::tasks::{compute, enumerate};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "XXLADDER_WORKERS";

const SAVE_INTERVAL: Duration = Duration::from_secs(2);

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `XXLADDER_WORKERS`; the default is the number of CPUs.
    pub workers: Option<usize>,
    /// Permit L = 8 tasks.
    pub allow_large: bool,
    /// Stop after this many new tasks, leaving the rest pending (as if interrupted).
    pub max_new_tasks: Option<usize>,
}

pub fn worker_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn guard_sizes(cfg: &ExperimentConfig, allow_large: bool) -> Result<(), CliError> {
    let largest = cfg.params.sites.iter().copied().max().unwrap_or(0);
    if largest >= 8 && !allow_large {
        return Err(CliError::Guard(format!("L = {largest} needs --allow-large (dense sector of dimension 12870)")));
    }
    if largest >= 7 {
        warn!("L = {largest} tasks take minutes per realization");
    }
    Ok(())
}

/// Runs every pending task, then aggregates if the run is complete.
///
/// Completed tasks of an earlier invocation with the same config are kept, so an
/// interrupted run resumes where it stopped.
pub fn run(cfg: &ExperimentConfig, out: &Path, opts: &RunOptions) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    guard_sizes(cfg, opts.allow_large)?;
    let started = Instant::now();
    let tasks = enumerate(cfg);
    let mut manifest = match RunManifest::load(out)? {
        Some(m) if m.config_hash == config_hash(cfg) => m,
        Some(_) => {
            return Err(CliError::Guard(format!(
                "{} holds a run with a different config; use a fresh output directory",
                out.display()
            )))
        }
        None => RunManifest::new(cfg, &tasks),
    };
    manifest.artifacts.clear();

    let mut pending: Vec<usize> = (0..tasks.len())
        .filter(|&i| {
            let rec = &manifest.tasks[i];
            rec.status != TaskStatus::Done || !out.join(&rec.path).exists()
        })
        .collect();
    if let Some(n) = opts.max_new_tasks {
        pending.truncate(n);
    }
    let workers = worker_count(opts.workers);
    info!("{}: {} tasks, {} pending, {workers} workers", cfg.kind, tasks.len(), pending.len());
    manifest.save(out)?;

    let shared = Mutex::new((manifest, Instant::now()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    pool.install(|| {
        pending.par_iter().for_each(|&i| {
            let task = &tasks[i];
            let t0 = Instant::now();
            let result = compute(cfg, task).map_err(CliError::from).and_then(|output| {
                let raw = RawFile::new(cfg.kind, task, output);
                write_atomic(&out.join(task.raw_path()), &raw.to_bytes())
            });
            let mut guard = shared.lock().expect("manifest lock");
            let (m, last_save) = &mut *guard;
            let rec = &mut m.tasks[i];
            rec.seconds = Some(t0.elapsed().as_secs_f64());
            match result {
                Ok(()) => {
                    rec.status = TaskStatus::Done;
                    rec.error = None;
                }
                Err(e) => {
                    warn!("task {} failed: {e}", task.id);
                    rec.status = TaskStatus::Failed;
                    rec.error = Some(e.to_string());
                }
            }
            if last_save.elapsed() >= SAVE_INTERVAL {
                if let Err(e) = m.save(out) {
                    warn!("could not save manifest: {e}");
                }
                *last_save = Instant::now();
            }
        })
    });

    let (mut manifest, _) = shared.into_inner().expect("manifest lock");
    manifest.elapsed_seconds += started.elapsed().as_secs_f64();
    manifest.save(out)?;
    let failed = manifest.count(TaskStatus::Failed);
    if failed > 0 {
        return Err(CliError::Partial { failed, total: manifest.tasks.len() });
    }
    if manifest.is_complete() {
        let written = aggregate::aggregate(out)?;
        manifest.artifacts = written.iter().map(|p| p.strip_prefix(out).unwrap_or(p).display().to_string()).collect();
        manifest.save(out)?;
    }
    Ok(manifest)
}
