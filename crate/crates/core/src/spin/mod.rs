//! Sector basis, ladder Hamiltonian, dense diagonalization and time evolution.

mod basis;
mod eigen;
mod hamiltonian;
mod operators;
mod params;

pub use basis::{build_sector_basis, SectorBasis, MAX_SITES};
pub use eigen::{diagonalize, evolve_state, spectrum, EigenSystem};
pub use hamiltonian::{bonds, build_hamiltonian, Bond, SectorHamiltonian};
pub use operators::{sigma_z_operator, SigmaZ, SpinLabel};
pub use params::{
    disorder_ensemble, sample_disorder, sample_disorder_stream, DisorderLegs, DisorderRealization, LadderParams,
};

use crate::error::Result;

/// Builds and diagonalizes one realization in a single call.
pub fn solve(params: &LadderParams, disorder: &DisorderRealization, basis: &SectorBasis) -> Result<EigenSystem> {
    diagonalize(&build_hamiltonian(params, disorder, basis)?)
}
