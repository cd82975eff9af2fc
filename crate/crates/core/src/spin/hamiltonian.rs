use nalgebra::DMatrix;

use super::basis::SectorBasis;
use super::params::{DisorderRealization, LadderParams};
use crate::error::{Error, Result};

/// A nearest-neighbour XX bond between two spins `(leg, site)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub coupling: f64,
}

/// Intra-leg bonds `i = 1..L-1` on both legs followed by rungs `i = 1..L` (open boundaries).
pub fn bonds(params: &LadderParams) -> Vec<Bond> {
    let l = params.sites;
    let mut out = Vec::with_capacity(3 * l - 2);
    for leg in 1..=2 {
        for i in 1..l {
            out.push(Bond { a: (leg, i), b: (leg, i + 1), coupling: params.j_par });
        }
    }
    for i in 1..=l {
        out.push(Bond { a: (1, i), b: (2, i), coupling: params.j_perp() });
    }
    out
}

/// Dense Sz = 0 block of the ladder-XX Hamiltonian.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub matrix: DMatrix<f64>,
    pub params: LadderParams,
    pub disorder: DisorderRealization,
}

impl SectorHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..j {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }
}

/// Assembles `H` on the half-filling sector.
///
/// `sx sx + sy sy = 2 (s+ s- + s- s+)`, so every allowed exchange of an up and a
/// down spin across a bond with coupling `J` contributes `2J`. The diagonal is
/// `sum_i h_{1,i} s_{1,i} + h_{2,i} s_{2,i}` with `s = +-1`.
pub fn build_hamiltonian(
    params: &LadderParams,
    disorder: &DisorderRealization,
    basis: &SectorBasis,
) -> Result<SectorHamiltonian> {
    params.validate()?;
    if basis.sites() != params.sites {
        return Err(Error::DimensionMismatch { expected: params.sites, found: basis.sites() });
    }
    if disorder.lower.len() != params.sites || disorder.upper.len() != params.sites {
        return Err(Error::DimensionMismatch { expected: params.sites, found: disorder.lower.len() });
    }
    let n = basis.dim();
    let mut h = DMatrix::<f64>::zeros(n, n);
    let bonds: Vec<(u32, f64)> = bonds(params)
        .into_iter()
        .map(|b| ((1 << basis.bit(b.a.0, b.a.1)) | (1 << basis.bit(b.b.0, b.b.1)), 2.0 * b.coupling))
        .collect();

    for (col, &state) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for site in 1..=params.sites {
            for leg in 1..=2 {
                let up = state >> basis.bit(leg, site) & 1 == 1;
                let s = if up { 1.0 } else { -1.0 };
                diag += disorder.field(leg, site) * s;
            }
        }
        h[(col, col)] = diag;

        for &(mask, amp) in &bonds {
            let pair = state & mask;
            // exactly one of the two spins is up
            if pair != 0 && pair != mask {
                let flipped = state ^ mask;
                debug_assert_eq!(flipped.count_ones(), state.count_ones());
                let row = basis.index_of(flipped).expect("exchange leaves the Sz sector");
                h[(row, col)] += amp;
            }
        }
    }
    Ok(SectorHamiltonian { matrix: h, params: *params, disorder: disorder.clone() })
}
