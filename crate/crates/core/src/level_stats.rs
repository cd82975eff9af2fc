//! Adjacent-gap-ratio statistics over disorder ensembles.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{build_hamiltonian, build_sector_basis, sample_disorder_stream, spectrum, LadderParams};

/// Gaps below this are treated as exact degeneracies.
pub const ZERO_GAP: f64 = 1e-12;

/// Ratios `min(d_n, d_{n+1}) / max(d_n, d_{n+1})` of an ascending spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRatios {
    pub ratios: Vec<f64>,
    /// Pairs where both gaps vanished and no ratio is defined.
    pub dropped: usize,
}

impl GapRatios {
    pub fn mean(&self) -> Option<f64> {
        (!self.ratios.is_empty()).then(|| self.ratios.iter().sum::<f64>() / self.ratios.len() as f64)
    }
}

pub fn gap_ratios(eigenvalues: &[f64]) -> Result<GapRatios> {
    if eigenvalues.len() < 3 {
        return Err(Error::TooFewLevels(eigenvalues.len()));
    }
    let gaps: Vec<f64> = eigenvalues.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut ratios = Vec::with_capacity(gaps.len() - 1);
    let mut dropped = 0;
    for g in gaps.windows(2) {
        let (lo, hi) = if g[0] < g[1] { (g[0], g[1]) } else { (g[1], g[0]) };
        if hi < ZERO_GAP {
            dropped += 1;
        } else if lo < ZERO_GAP {
            ratios.push(0.0);
        } else {
            ratios.push(lo / hi);
        }
    }
    Ok(GapRatios { ratios, dropped })
}

/// Ensemble summary at one disorder strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRatioReport {
    pub sites: usize,
    pub alpha: f64,
    pub disorder: f64,
    pub realizations: usize,
    pub seed: u64,
    /// Fraction of the spectrum kept around its centre; `None` keeps every level.
    pub middle_fraction: Option<f64>,
    pub per_realization_means: Vec<f64>,
    pub ensemble_mean: f64,
    /// Standard error of the per-realization means (`NaN` for a single realization).
    pub stderr: f64,
    pub dropped_pairs: usize,
}

/// Central `fraction` of an ascending spectrum.
pub fn middle_slice(levels: &[f64], fraction: f64) -> &[f64] {
    let n = levels.len();
    let keep = ((n as f64 * fraction).round() as usize).clamp(3.min(n), n);
    let start = (n - keep) / 2;
    &levels[start..start + keep]
}

/// `<r>` for every `h` in `disorders`; realization `k` uses stream `k` of `seed`.
pub fn ensemble_gap_ratio(
    params: &LadderParams,
    disorders: &[f64],
    realizations: usize,
    seed: u64,
    middle_fraction: Option<f64>,
) -> Result<Vec<GapRatioReport>> {
    if realizations == 0 {
        return Err(Error::InvalidParameter { name: "realizations", reason: "must be at least 1".into() });
    }
    if let Some(f) = middle_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidParameter { name: "middle_fraction", reason: format!("{f} not in (0, 1]") });
        }
    }
    let basis = build_sector_basis(params.sites)?;
    disorders
        .iter()
        .map(|&h| {
            let p = params.with_disorder(h);
            p.validate()?;
            let mut means = Vec::with_capacity(realizations);
            let mut dropped = 0;
            for k in 0..realizations as u64 {
                let ham = build_hamiltonian(&p, &sample_disorder_stream(&p, seed, k), &basis)?;
                let levels = spectrum(&ham);
                let levels = match middle_fraction {
                    Some(f) => middle_slice(&levels, f),
                    None => &levels[..],
                };
                let g = gap_ratios(levels)?;
                dropped += g.dropped;
                means.push(g.mean().ok_or(Error::Empty("gap ratios after dropping degenerate pairs"))?);
            }
            let (mean, stderr) = mean_stderr(&means);
            Ok(GapRatioReport {
                sites: p.sites,
                alpha: p.alpha,
                disorder: h,
                realizations,
                seed,
                middle_fraction,
                per_realization_means: means,
                ensemble_mean: mean,
                stderr,
                dropped_pairs: dropped,
            })
        })
        .collect()
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// CSV with columns `h,L,alpha,realizations,mean_r,stderr`.
pub fn write_csv<W: Write>(reports: &[GapRatioReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "h,L,alpha,realizations,mean_r,stderr")?;
    for r in reports {
        writeln!(out, "{},{},{},{},{:.10},{:.10}", r.disorder, r.sites, r.alpha, r.realizations, r.ensemble_mean, r.stderr)?;
    }
    Ok(())
}
