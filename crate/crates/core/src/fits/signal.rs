use serde::{Deserialize, Serialize};

use super::saturation_mean;
use crate::error::{Error, Result};
use crate::otoc::OtocSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// `|F_ex - mean_j F_j|`
    Eps1,
    /// `||F_ex|^2 - mean_j |F_j|^2|`
    Eps2,
}

/// Deviation of a sampled OTOC from the exact one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSignal {
    pub times: Vec<f64>,
    pub eps: Vec<f64>,
    pub kind: ErrorKind,
    /// Number of initial states `M`.
    pub samples: usize,
    /// Sector dimension `N`.
    pub dim: usize,
    /// Mean over the saturation window (last quarter of the grid).
    pub saturation_mean: f64,
}

pub fn error_signal(exact: &OtocSeries, sampled: &OtocSeries, kind: ErrorKind) -> Result<ErrorSignal> {
    if exact.times != sampled.times {
        return Err(Error::GridMismatch);
    }
    if exact.is_empty() {
        return Err(Error::Empty("time grid"));
    }
    let eps: Vec<f64> = match kind {
        ErrorKind::Eps1 => exact.values.iter().zip(&sampled.values).map(|(e, s)| (e - s).norm()).collect(),
        ErrorKind::Eps2 => {
            let rows = sampled.per_sample.as_ref().ok_or(Error::MissingSamples)?;
            let m = rows.len() as f64;
            (0..exact.len())
                .map(|k| {
                    let mean_sq = rows.iter().map(|r| r[k].norm_sqr()).sum::<f64>() / m;
                    (exact.values[k].norm_sqr() - mean_sq).abs()
                })
                .collect()
        }
    };
    Ok(ErrorSignal {
        saturation_mean: saturation_mean(&eps),
        times: exact.times.clone(),
        eps,
        kind,
        samples: sampled.meta.samples,
        dim: exact.meta.dim,
    })
}
