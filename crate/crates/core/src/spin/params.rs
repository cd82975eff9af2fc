use rand::Rng;
use rand_distr::Uniform;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// How the random longitudinal field is laid out over the two legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderLegs {
    /// One field `h_i` per column acting on both spins of rung `i`.
    #[default]
    Shared,
    /// Independent fields on every spin.
    Independent,
}

/// Couplings and disorder strength of a ladder with open boundaries.
///
/// Energies are in units of the intra-leg coupling; the rung coupling is
/// `alpha * j_par`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderParams {
    /// Sites per leg.
    pub sites: usize,
    pub j_par: f64,
    /// Rung-to-leg coupling ratio.
    pub alpha: f64,
    /// Field strength: `h_i` is uniform on `[-disorder, disorder]`.
    pub disorder: f64,
    #[serde(default)]
    pub legs: DisorderLegs,
}

impl LadderParams {
    pub fn new(sites: usize, alpha: f64, disorder: f64) -> Result<Self> {
        let p = Self { sites, j_par: 1.0, alpha, disorder, legs: DisorderLegs::Shared };
        p.validate()?;
        Ok(p)
    }

    pub fn with_legs(mut self, legs: DisorderLegs) -> Self {
        self.legs = legs;
        self
    }

    pub fn with_disorder(mut self, disorder: f64) -> Self {
        self.disorder = disorder;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidParameter { name: "sites", reason: format!("L = {} < 2", self.sites) });
        }
        if !(self.j_par > 0.0 && self.j_par.is_finite()) {
            return Err(Error::InvalidParameter { name: "j_par", reason: format!("{} is not positive", self.j_par) });
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter { name: "alpha", reason: format!("{} is negative", self.alpha) });
        }
        if !(self.disorder >= 0.0 && self.disorder.is_finite()) {
            return Err(Error::InvalidParameter { name: "disorder", reason: format!("{} is negative", self.disorder) });
        }
        Ok(())
    }

    pub fn j_perp(&self) -> f64 {
        self.alpha * self.j_par
    }
}

/// One draw of the random fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    /// Fields on leg 1, indexed by column.
    pub lower: Vec<f64>,
    /// Fields on leg 2; equal to `lower` for [`DisorderLegs::Shared`].
    pub upper: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl DisorderRealization {
    /// A field-free realization (clean ladder).
    pub fn clean(sites: usize) -> Self {
        Self { lower: vec![0.0; sites], upper: vec![0.0; sites], seed: 0, stream: 0 }
    }

    /// Explicit per-column fields shared by both legs.
    pub fn from_fields(fields: Vec<f64>) -> Self {
        Self { upper: fields.clone(), lower: fields, seed: 0, stream: 0 }
    }

    pub fn sites(&self) -> usize {
        self.lower.len()
    }

    /// Field on `(leg, site)`, both 1-based.
    pub fn field(&self, leg: usize, site: usize) -> f64 {
        match leg {
            1 => self.lower[site - 1],
            _ => self.upper[site - 1],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().chain(&self.upper).fold(0.0, |m, h| m.max(h.abs()))
    }
}

/// Draws the fields of one realization from `seed`.
pub fn sample_disorder(params: &LadderParams, seed: u64) -> DisorderRealization {
    sample_disorder_stream(params, seed, 0)
}

/// Draws realization number `stream` of the ensemble keyed by `seed`.
pub fn sample_disorder_stream(params: &LadderParams, seed: u64, stream: u64) -> DisorderRealization {
    let mut rng = rng::keyed(seed, stream);
    let dist = Uniform::new_inclusive(-params.disorder, params.disorder);
    let lower: Vec<f64> = (0..params.sites).map(|_| rng.sample(dist)).collect();
    let upper = match params.legs {
        DisorderLegs::Shared => lower.clone(),
        DisorderLegs::Independent => (0..params.sites).map(|_| rng.sample(dist)).collect(),
    };
    DisorderRealization { lower, upper, seed, stream }
}

/// `count` consecutive realizations of the ensemble keyed by `seed`.
pub fn disorder_ensemble(params: &LadderParams, seed: u64, count: usize) -> Vec<DisorderRealization> {
    (0..count as u64).map(|k| sample_disorder_stream(params, seed, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_interval_gives_zero_fields() {
        let p = LadderParams::new(5, 1.0, 0.0).unwrap();
        for seed in [0, 1, 77] {
            assert!(sample_disorder(&p, seed).lower.iter().all(|&h| h == 0.0));
        }
    }

    #[test]
    fn same_seed_same_fields() {
        let p = LadderParams::new(6, 1.0, 1.0).unwrap();
        assert_eq!(sample_disorder(&p, 42), sample_disorder(&p, 42));
        assert_ne!(sample_disorder(&p, 42).lower, sample_disorder(&p, 43).lower);
    }

    #[test]
    fn strong_disorder_statistics() {
        // 10^5 draws on [-10, 10]: the sample mean has standard error 10/sqrt(3e5) ~ 0.018.
        let p = LadderParams::new(4, 1.0, 10.0).unwrap();
        let mut all = Vec::new();
        for k in 0..25_000 {
            all.extend(sample_disorder_stream(&p, 2024, k).lower);
        }
        assert_eq!(all.len(), 100_000);
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        assert!(mean.abs() < 0.15, "mean {mean}");
        assert!(all.iter().all(|h| (-10.0..=10.0).contains(h)));
    }

    #[test]
    fn shared_legs_mirror_fields() {
        let p = LadderParams::new(5, 1.0, 2.0).unwrap();
        let d = sample_disorder(&p, 3);
        assert_eq!(d.lower, d.upper);
        let q = p.with_legs(DisorderLegs::Independent);
        let e = sample_disorder(&q, 3);
        assert_ne!(e.lower, e.upper);
        assert!(e.max_abs() <= 2.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LadderParams::new(1, 1.0, 1.0).is_err());
        assert!(LadderParams::new(3, -0.5, 1.0).is_err());
        assert!(LadderParams::new(3, 1.0, -1.0).is_err());
        let mut p = LadderParams::new(3, 1.0, 1.0).unwrap();
        p.j_par = 0.0;
        assert!(p.validate().is_err());
    }
}
