use nalgebra::DVector;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Complex64};
use crate::rng;
use crate::spin::{EigenSystem, SectorBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Haar,
    Fock,
    Custom,
}

/// A normalized pure state on the sector.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub amplitudes: DVector<Complex64>,
    pub kind: StateKind,
    pub seed: Option<u64>,
}

impl InitialState {
    /// Basis state `index` (a Fock state chosen by hand).
    pub fn basis(basis: &SectorBasis, index: usize) -> Self {
        let mut amplitudes = DVector::from_element(basis.dim(), Complex64::new(0.0, 0.0));
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes, kind: StateKind::Fock, seed: None }
    }

    /// Wraps an arbitrary vector after checking its norm.
    pub fn custom(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, kind: StateKind::Custom, seed: None })
    }

    /// The occupied index of a Fock state.
    pub fn fock_index(&self) -> Option<usize> {
        match self.kind {
            StateKind::Fock => self.amplitudes.iter().position(|z| z.norm_sqr() > 0.5),
            _ => None,
        }
    }
}

/// Haar-random state: i.i.d. standard complex Gaussian amplitudes, normalized.
pub fn haar_state(basis: &SectorBasis, seed: u64) -> InitialState {
    let mut rng = rng::seeded(seed);
    let v = DVector::from_fn(basis.dim(), |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let norm = linalg::norm(&v);
    InitialState { amplitudes: v / Complex64::from(norm), kind: StateKind::Haar, seed: Some(seed) }
}

/// Uniformly random basis state.
pub fn fock_state(basis: &SectorBasis, seed: u64) -> InitialState {
    let k = rng::seeded(seed).gen_range(0..basis.dim());
    InitialState { seed: Some(seed), ..InitialState::basis(basis, k) }
}

/// `count` distinct random basis states (sampling without replacement).
///
/// The draw is a prefix-stable permutation: for a fixed seed the first `m` states
/// of a larger request equal the states of a request for `m`.
pub fn distinct_fock_states(basis: &SectorBasis, count: usize, seed: u64) -> Result<Vec<InitialState>> {
    if count == 0 || count > basis.dim() {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("{count} distinct Fock states requested from a sector of dimension {}", basis.dim()),
        });
    }
    let order = index::sample(&mut rng::seeded(seed), basis.dim(), basis.dim());
    Ok(order
        .into_iter()
        .take(count)
        .map(|k| InitialState { seed: Some(seed), ..InitialState::basis(basis, k) })
        .collect())
}

/// Eigenstate occupation numbers `|<E_b|psi>|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EonDistribution {
    pub weights: Vec<f64>,
    pub energies: Vec<f64>,
}

pub fn eon_distribution(eig: &EigenSystem, state: &InitialState) -> Result<EonDistribution> {
    if state.amplitudes.len() != eig.dim() {
        return Err(Error::DimensionMismatch { expected: eig.dim(), found: state.amplitudes.len() });
    }
    let norm = linalg::norm(&state.amplitudes);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let c = eig.to_eigenbasis(&state.amplitudes);
    Ok(EonDistribution { weights: c.iter().map(|z| z.norm_sqr()).collect(), energies: eig.values.clone() })
}

/// Inverse participation ratio `(sum_b w_b^2)^-1`.
pub fn effective_dimension(eon: &EonDistribution) -> f64 {
    1.0 / eon.weights.iter().map(|w| w * w).sum::<f64>()
}
