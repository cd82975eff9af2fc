use std::sync::OnceLock;

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use super::hamiltonian::SectorHamiltonian;
use super::params::LadderParams;
use crate::error::{Error, Result};
use crate::linalg::{self, Complex64, SplitMatrix};

// Relative reconstruction tolerance accepted from the dense solver.
const EIGEN_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a sector Hamiltonian.
#[derive(Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub params: Option<LadderParams>,
    pub seed: Option<u64>,
    transposed: OnceLock<DMatrix<f64>>,
}

impl Clone for EigenSystem {
    fn clone(&self) -> Self {
        Self {
            values: self.values.clone(),
            vectors: self.vectors.clone(),
            params: self.params,
            seed: self.seed,
            transposed: OnceLock::new(),
        }
    }
}

impl EigenSystem {
    /// Diagonalizes an arbitrary real symmetric matrix.
    pub fn from_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
        }
        let scale = matrix.amax().max(1.0);
        let eig = Mat::<f64>::from_fn(n, n, |i, j| matrix[(i, j)]).selfadjoint_eigendecomposition(Side::Lower);
        let (s, u) = (eig.s().column_vector(), eig.u());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s.read(a).total_cmp(&s.read(b)));
        let values: Vec<f64> = order.iter().map(|&k| s.read(k)).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| u.read(i, order[j]));
        let out = Self { values, vectors, params: None, seed: None, transposed: OnceLock::new() };
        let err = out.reconstruction_error(&matrix);
        if !(err <= EIGEN_TOL * scale) {
            return Err(Error::EigenNonConvergence { dim: n, seed: None });
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V^T`, computed once on first use.
    pub fn vectors_t(&self) -> &DMatrix<f64> {
        self.transposed.get_or_init(|| self.vectors.transpose())
    }

    /// `max |V diag(E) V^T - H|`.
    pub fn reconstruction_error(&self, h: &DMatrix<f64>) -> f64 {
        let mut scaled = self.vectors.clone();
        for (j, &e) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(e);
        }
        (scaled * self.vectors_t() - h).amax()
    }

    /// `max |V^T V - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.vectors_t() * &self.vectors;
        (g - DMatrix::identity(self.dim(), self.dim())).amax()
    }

    /// `U(t) = exp(-iHt)` applied to every column of `block`.
    pub fn evolve_block(&self, block: &SplitMatrix, t: f64) -> SplitMatrix {
        let mut coeffs = block.left_mul(self.vectors_t());
        coeffs.phase_rows(&self.values, t);
        coeffs.left_mul(&self.vectors)
    }

    /// Eigenbasis amplitudes `V^T psi`.
    pub fn to_eigenbasis(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let re = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.re));
        let im = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.im));
        let (a, b) = (self.vectors.tr_mul(&re), self.vectors.tr_mul(&im));
        DVector::from_fn(psi.len(), |i, _| Complex64::new(a[i], b[i]))
    }

    fn from_eigenbasis(&self, c: &DVector<Complex64>) -> DVector<Complex64> {
        let re = DVector::from_iterator(c.len(), c.iter().map(|z| z.re));
        let im = DVector::from_iterator(c.len(), c.iter().map(|z| z.im));
        let (a, b) = (&self.vectors * re, &self.vectors * im);
        DVector::from_fn(c.len(), |i, _| Complex64::new(a[i], b[i]))
    }

    /// Unchecked `exp(-iHt) psi`.
    pub(crate) fn propagate(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut c = self.to_eigenbasis(psi);
        for (z, &e) in c.iter_mut().zip(&self.values) {
            *z *= Complex64::from_polar(1.0, -e * t);
        }
        self.from_eigenbasis(&c)
    }
}

/// Full dense eigendecomposition of `h`.
pub fn diagonalize(h: &SectorHamiltonian) -> Result<EigenSystem> {
    let mut eig = EigenSystem::from_symmetric(h.matrix.clone()).map_err(|e| match e {
        Error::EigenNonConvergence { dim, .. } => Error::EigenNonConvergence { dim, seed: Some(h.disorder.seed) },
        other => other,
    })?;
    eig.params = Some(h.params);
    eig.seed = Some(h.disorder.seed);
    Ok(eig)
}

/// Ascending eigenvalues only; cheaper than [`diagonalize`] for level statistics.
pub fn spectrum(h: &SectorHamiltonian) -> Vec<f64> {
    let mut e: Vec<f64> = h.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// `V diag(exp(-i E_n t)) V^T psi`. Negative `t` evolves backwards.
pub fn evolve_state(eig: &EigenSystem, psi: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    if psi.len() != eig.dim() {
        return Err(Error::DimensionMismatch { expected: eig.dim(), found: psi.len() });
    }
    let norm = linalg::norm(psi);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(eig.propagate(psi, t))
}
