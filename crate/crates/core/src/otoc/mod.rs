//! Infinite-temperature out-of-time-order correlators
//! `F(t) = <sz_i(t) sz_1 sz_i(t) sz_1>` and initial-state diagnostics.

mod exact;
mod sampled;
mod states;

use serde::{Deserialize, Serialize};

pub use exact::{exact_otoc, exact_otoc_projected, otoc_profile, ProjectedOtoc};
pub use sampled::{otoc_expectation, sampled_otoc};
pub use states::{
    distinct_fock_states, effective_dimension, eon_distribution, fock_state, haar_state, EonDistribution,
    InitialState, StateKind,
};

use crate::error::{Error, Result};
use crate::linalg::Complex64;
use crate::spin::{LadderParams, SpinLabel};

/// Which estimator produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Exact,
    Haar,
    Fock,
    /// States supplied by the caller or of mixed kinds.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocMeta {
    pub params: Option<LadderParams>,
    /// `(probe, reference)`: `sz_i` and `sz_1`.
    pub pair: (SpinLabel, SpinLabel),
    pub estimator: Estimator,
    /// Sector dimension `N`.
    pub dim: usize,
    /// Number of initial states `M` (0 for the exact trace).
    pub samples: usize,
    /// Number of disorder realizations averaged.
    pub realizations: usize,
    /// Disorder seeds, then state seeds where applicable.
    pub seeds: Vec<u64>,
    /// Largest trace/commutator disagreement seen by the exact estimator.
    pub cross_check: Option<f64>,
}

/// OTOC values on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// One row per initial state or per realization, aligned with `times`.
    pub per_sample: Option<Vec<Vec<Complex64>>>,
    pub meta: OtocMeta,
}

impl OtocSeries {
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Mean over realizations; each input's mean becomes one row of `per_sample`.
    pub fn average(series: &[OtocSeries]) -> Result<OtocSeries> {
        let first = series.first().ok_or(Error::Empty("series list"))?;
        if series.iter().any(|s| s.times != first.times) {
            return Err(Error::GridMismatch);
        }
        let n = series.len() as f64;
        let values = (0..first.len())
            .map(|k| series.iter().map(|s| s.values[k]).sum::<Complex64>() / n)
            .collect();
        let mut meta = first.meta.clone();
        meta.realizations = series.iter().map(|s| s.meta.realizations).sum();
        meta.seeds = series.iter().flat_map(|s| s.meta.seeds.iter().copied()).collect();
        meta.cross_check = series.iter().filter_map(|s| s.meta.cross_check).reduce(f64::max);
        Ok(OtocSeries {
            times: first.times.clone(),
            values,
            per_sample: Some(series.iter().map(|s| s.values.clone()).collect()),
            meta,
        })
    }

    /// Pointwise standard deviation across `per_sample` rows (population form).
    pub fn sample_std(&self) -> Result<Vec<f64>> {
        let rows = self.per_sample.as_ref().ok_or(Error::MissingSamples)?;
        let m = rows.len() as f64;
        Ok((0..self.len())
            .map(|k| {
                let mean = self.values[k].re;
                (rows.iter().map(|r| (r[k].re - mean).powi(2)).sum::<f64>() / m).sqrt()
            })
            .collect())
    }
}

fn check_dims(eig_dim: usize, dims: &[usize]) -> Result<()> {
    match dims.iter().find(|&&d| d != eig_dim) {
        Some(&d) => Err(Error::DimensionMismatch { expected: eig_dim, found: d }),
        None => Ok(()),
    }
}
