//! Task enumeration, seeding and the per-realization computations.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use xxladder::fits::{self, ErrorKind};
use xxladder::level_stats::{gap_ratios, middle_slice};
use xxladder::otoc::{
    distinct_fock_states, effective_dimension, eon_distribution, exact_otoc_projected, fock_state, haar_state, sampled_otoc,
    InitialState,
};
use xxladder::protocol::{protocol_run, verify_sign_reversal, InterferometricPath, Protocol, ProtocolSetup};
use xxladder::rng::mix;
use xxladder::spin::{build_hamiltonian, build_sector_basis, diagonalize, sample_disorder, sigma_z_operator, spectrum};
use xxladder::wavefront::realization_profile;
use xxladder::{DisorderLegs, LadderParams, Result};

use crate::config::{EstimatorKind, ExperimentConfig, ExperimentKind};

/// One point of the parameter product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub sites: usize,
    pub alpha: f64,
    pub disorder: f64,
    pub legs: DisorderLegs,
}

impl ParamPoint {
    pub fn params(&self) -> LadderParams {
        LadderParams::new(self.sites, self.alpha, self.disorder).expect("validated config").with_legs(self.legs)
    }

    fn legs_name(&self) -> &'static str {
        match self.legs {
            DisorderLegs::Shared => "shared",
            DisorderLegs::Independent => "independent",
        }
    }

    /// Filesystem-safe label, also used in task ids.
    pub fn label(&self) -> String {
        format!("L{}_alpha{}_h{}_{}", self.sites, self.alpha, self.disorder, self.legs_name())
    }

    /// Leading CSV columns `L,alpha,h,legs`.
    pub fn csv_prefix(&self) -> String {
        format!("{},{},{},{}", self.sites, self.alpha, self.disorder, self.legs_name())
    }
}

/// Parameter points in config order (sites outermost, then alpha, then h).
pub fn param_points(cfg: &ExperimentConfig) -> Vec<ParamPoint> {
    let p = &cfg.params;
    let mut out = Vec::new();
    for &sites in &p.sites {
        for &alpha in &p.alpha {
            for &disorder in &p.disorder {
                out.push(ParamPoint { sites, alpha, disorder, legs: p.legs });
            }
        }
    }
    out
}

/// `sha256(master, kind, parameter tuple, index)`, first eight bytes.
///
/// Adding parameter values to a config never changes the streams of existing tasks.
pub fn task_seed(master: u64, kind: ExperimentKind, point: &ParamPoint, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    for part in [kind.name(), &point.label()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.update((index as u64).to_le_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: String,
    /// Position of the point in [`param_points`].
    pub point_index: usize,
    pub point: ParamPoint,
    pub index: usize,
    pub seed: u64,
}

impl Task {
    pub fn raw_path(&self) -> String {
        format!("raw/{}.csv", self.id)
    }
}

/// Every (parameter point, realization) task of a config, in canonical order.
pub fn enumerate(cfg: &ExperimentConfig) -> Vec<Task> {
    param_points(cfg)
        .into_iter()
        .enumerate()
        .flat_map(|(pi, point)| {
            (0..cfg.realizations_for(point.sites)).map(move |index| Task {
                id: format!("{}/r{index:05}", point.label()),
                point_index: pi,
                point,
                index,
                seed: task_seed(cfg.seed, cfg.kind, &point, index),
            })
        })
        .collect()
}

/// Numeric output of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Sector dimension `N`.
    pub dim: usize,
}

/// Runs one realization. The disorder draw uses the task seed; initial states use
/// seeds derived from it.
pub fn compute(cfg: &ExperimentConfig, task: &Task) -> Result<TaskOutput> {
    let params = task.point.params();
    let basis = build_sector_basis(params.sites)?;
    let disorder = sample_disorder(&params, task.seed);
    let ham = build_hamiltonian(&params, &disorder, &basis)?;
    let dim = basis.dim();
    let times = cfg.times();
    let state_seed = mix(task.seed, 1);

    let (columns, rows) = match cfg.kind {
        ExperimentKind::LevelStats => {
            let levels = spectrum(&ham);
            let levels = cfg.middle_fraction.map_or(&levels[..], |f| middle_slice(&levels, f));
            let g = gap_ratios(levels)?;
            let mean = g.mean().ok_or(xxladder::Error::Empty("gap ratios after dropping degenerate pairs"))?;
            (vec!["mean_r", "pairs", "dropped"], vec![vec![mean, g.ratios.len() as f64, g.dropped as f64]])
        }
        ExperimentKind::OtocAlphaSweep | ExperimentKind::OtocDecay => {
            let eig = diagonalize(&ham)?;
            let s1 = sigma_z_operator(&basis, 1, 1)?;
            let mut rows = Vec::new();
            for probe in cfg.probes_for(params.sites) {
                let si = sigma_z_operator(&basis, 1, probe)?;
                let series = match cfg.estimator.kind {
                    EstimatorKind::Exact => exact_otoc_projected(&eig, &si, &s1, &times)?,
                    kind => {
                        let states = draw_states(kind, &basis, cfg.estimator.states[0], state_seed)?;
                        sampled_otoc(&eig, &si, &s1, &states, &times)?
                    }
                };
                rows.extend(series.times.iter().zip(&series.values).map(|(&t, z)| vec![probe as f64, t, z.re, z.im]));
            }
            (vec!["probe", "t", "re", "im"], rows)
        }
        ExperimentKind::Lightcone => {
            let eig = diagonalize(&ham)?;
            let profile = realization_profile(&eig, &basis, &times)?;
            let rows = profile
                .iter()
                .enumerate()
                .flat_map(|(d, row)| times.iter().zip(row).map(move |(&t, &v)| vec![(d + 1) as f64, t, v]))
                .collect();
            (vec!["dx", "t", "value"], rows)
        }
        ExperimentKind::SamplingError => {
            let eig = diagonalize(&ham)?;
            let (s1, si) = (sigma_z_operator(&basis, 1, 1)?, sigma_z_operator(&basis, 1, cfg.probes_for(params.sites)[0])?);
            let exact = exact_otoc_projected(&eig, &si, &s1, &times)?;
            let max_m = *cfg.estimator.states.iter().max().expect("validated");
            let states = draw_states(cfg.estimator.kind, &basis, max_m, state_seed)?;
            let sampled = sampled_otoc(&eig, &si, &s1, &states, &times)?;
            let per_state = sampled.per_sample.as_ref().expect("sampled series keeps per-state rows");
            let de: Vec<f64> =
                states.iter().map(|s| eon_distribution(&eig, s).map(|e| effective_dimension(&e))).collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for &m in &cfg.estimator.states {
                let prefix = prefix_series(&sampled, &per_state[..m]);
                let e1 = fits::error_signal(&exact, &prefix, ErrorKind::Eps1)?;
                let e2 = fits::error_signal(&exact, &prefix, ErrorKind::Eps2)?;
                let de_mean = de[..m].iter().sum::<f64>() / m as f64;
                rows.push(vec![m as f64, e1.saturation_mean, e2.saturation_mean, de_mean]);
            }
            (vec!["M", "eps1_sat", "eps2_sat", "de_mean"], rows)
        }
        ExperimentKind::ProtocolCheck => {
            let eig = diagonalize(&ham)?;
            let setup = ProtocolSetup::new(&eig, &basis)?;
            let gate_residual = verify_sign_reversal(&ham.matrix, &setup.gate)?;
            let states = match cfg.estimator.kind {
                EstimatorKind::Exact => vec![fock_state(&basis, state_seed), haar_state(&basis, mix(state_seed, 1))],
                kind => draw_states(kind, &basis, cfg.estimator.states.first().copied().unwrap_or(2), state_seed)?,
            };
            let mut worst = [0.0f64; 3];
            for probe in cfg.probes_for(params.sites) {
                for s in &states {
                    let protocols = [
                        Protocol::Interference,
                        Protocol::Interferometric(InterferometricPath::Literal),
                        Protocol::Interferometric(InterferometricPath::Direct),
                    ];
                    for (w, p) in worst.iter_mut().zip(protocols) {
                        *w = w.max(protocol_run(&setup, s, probe, &times, p)?.max_deviation);
                    }
                }
            }
            (
                vec!["sign_reversal", "interference", "interferometric_literal", "interferometric_direct"],
                vec![vec![gate_residual, worst[0], worst[1], worst[2]]],
            )
        }
    };
    Ok(TaskOutput { columns, rows, dim })
}

fn draw_states(kind: EstimatorKind, basis: &xxladder::SectorBasis, count: usize, seed: u64) -> Result<Vec<InitialState>> {
    match kind {
        EstimatorKind::Fock => distinct_fock_states(basis, count, seed),
        _ => Ok((0..count as u64).map(|j| haar_state(basis, mix(seed, j))).collect()),
    }
}

/// The sampled series restricted to its first `rows.len()` states.
fn prefix_series(full: &xxladder::OtocSeries, rows: &[Vec<xxladder::Complex64>]) -> xxladder::OtocSeries {
    let m = rows.len() as f64;
    let values = (0..full.len()).map(|k| rows.iter().map(|r| r[k]).sum::<xxladder::Complex64>() / m).collect();
    let mut meta = full.meta.clone();
    meta.samples = rows.len();
    xxladder::OtocSeries { times: full.times.clone(), values, per_sample: Some(rows.to_vec()), meta }
}
