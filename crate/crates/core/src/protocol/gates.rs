use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex64, SplitMatrix};
use crate::spin::SectorBasis;

/// Amplitudes below this are treated as exact zeros (e.g. `cos(pi/2)`).
const ZERO_AMPLITUDE: f64 = 1e-14;
/// Full-space matrices are only built up to this many sites per leg.
pub const MAX_FULL_SPACE_SITES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Single-spin rotation `R_a(theta) = exp(-i theta sigma^a / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub leg: usize,
    pub site: usize,
    pub axis: Axis,
    pub angle: f64,
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix in the local bit basis: index 0 is spin down, 1 is spin up,
/// rows are the output bit.
pub fn pauli(axis: Axis) -> Matrix2<Complex64> {
    match axis {
        Axis::X => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Axis::Y => Matrix2::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)),
        Axis::Z => Matrix2::new(c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
    }
}

impl Rotation {
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let (s, co) = (self.angle / 2.0).sin_cos();
        Matrix2::identity() * c(co, 0.0) - pauli(self.axis) * c(0.0, s)
    }
}

/// Ordered list of rotations; the first entry acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub sites: usize,
    pub rotations: Vec<Rotation>,
}

/// The pi-pulse pattern that conjugates the ladder Hamiltonian to `-H`.
///
/// For every odd column `i` it applies `R^x` to spins `(1,i), (1,i+1), (2,i), (2,i+1)`
/// and then `R^z` to `(1,i)` and `(2,i+1)`. Every spin is flipped; spins that also get
/// `R^z` end up proportional to `sigma^y`, the rest to `sigma^x`. The `sigma^y` spins
/// form a checkerboard, so every bond pairs one of each and both `xx` and `yy` change sign.
pub fn sign_reversal_unitary(sites: usize) -> Result<GateSequence> {
    if sites < 2 {
        return Err(Error::Size(sites));
    }
    let pi = std::f64::consts::PI;
    let rot = |leg, site, axis| Rotation { leg, site, axis, angle: pi };
    let mut rotations = Vec::new();
    for i in (1..=sites).step_by(2) {
        rotations.push(rot(1, i, Axis::X));
        rotations.push(rot(1, i, Axis::Z));
        rotations.push(rot(2, i, Axis::X));
        if i < sites {
            rotations.push(rot(1, i + 1, Axis::X));
            rotations.push(rot(2, i + 1, Axis::X));
            rotations.push(rot(2, i + 1, Axis::Z));
        }
    }
    Ok(GateSequence { sites, rotations })
}

impl GateSequence {
    /// The sequence with every rotation about `axis` removed.
    pub fn without_axis(&self, axis: Axis) -> Self {
        Self { sites: self.sites, rotations: self.rotations.iter().copied().filter(|r| r.axis != axis).collect() }
    }

    fn validate(&self) -> Result<()> {
        for r in &self.rotations {
            if !(r.leg == 1 || r.leg == 2) || r.site == 0 || r.site > self.sites {
                return Err(Error::IndexOutOfRange(format!("rotation on (leg {}, site {})", r.leg, r.site)));
            }
        }
        Ok(())
    }

    /// Net 2x2 unitary acting on each spin, indexed by bit position.
    pub fn local_unitaries(&self) -> Result<Vec<Matrix2<Complex64>>> {
        self.validate()?;
        let mut out = vec![Matrix2::identity(); 2 * self.sites];
        for r in &self.rotations {
            let bit = (r.leg - 1) * self.sites + (r.site - 1);
            out[bit] = r.matrix() * out[bit];
        }
        Ok(out)
    }

    /// Restriction to the half-filling sector. Requires every spin's net gate to be
    /// diagonal or off-diagonal, so that basis states map to basis states.
    pub fn sector_gate(&self, basis: &SectorBasis) -> Result<SectorGate> {
        if basis.sites() != self.sites {
            return Err(Error::DimensionMismatch { expected: self.sites, found: basis.sites() });
        }
        let locals = self.local_unitaries()?;
        // per spin: for input bit b, (output bit, amplitude)
        let mut maps = Vec::with_capacity(locals.len());
        for m in &locals {
            let mut map = [(0u32, c(0.0, 0.0)); 2];
            for (b, slot) in map.iter_mut().enumerate() {
                let (lo, hi) = (m[(0, b)], m[(1, b)]);
                *slot = match (lo.norm() > ZERO_AMPLITUDE, hi.norm() > ZERO_AMPLITUDE) {
                    (true, false) => (0, lo),
                    (false, true) => (1, hi),
                    _ => return Err(Error::LeavesSector),
                };
            }
            maps.push(map);
        }
        let mut target = Vec::with_capacity(basis.dim());
        let mut phase = Vec::with_capacity(basis.dim());
        for &s in basis.states() {
            let mut out = 0u32;
            let mut amp = c(1.0, 0.0);
            for (bit, map) in maps.iter().enumerate() {
                let (o, a) = map[(s >> bit & 1) as usize];
                out |= o << bit;
                amp *= a;
            }
            target.push(basis.index_of(out).ok_or(Error::LeavesSector)?);
            phase.push(amp);
        }
        Ok(SectorGate { target, phase })
    }

    /// Dense unitary on the full `2^(2L)` space (basis index = bitmask).
    pub fn full_unitary(&self) -> Result<DMatrix<Complex64>> {
        if self.sites > MAX_FULL_SPACE_SITES {
            return Err(Error::Size(self.sites));
        }
        let dim = 1usize << (2 * self.sites);
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for r in &self.rotations {
            self.validate()?;
            let bit = (r.leg - 1) * self.sites + (r.site - 1);
            let m = r.matrix();
            let mut next = DMatrix::zeros(dim, dim);
            for col in 0..dim {
                for row in 0..dim {
                    let z = u[(row, col)];
                    if z.norm_sqr() == 0.0 {
                        continue;
                    }
                    let b = row >> bit & 1;
                    for o in 0..2 {
                        next[((row & !(1 << bit)) | (o << bit), col)] += m[(o, b)] * z;
                    }
                }
            }
            u = next;
        }
        Ok(u)
    }
}

/// A sector gate that maps basis state `b` to `phase[b] |target[b]>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorGate {
    pub target: Vec<usize>,
    pub phase: Vec<Complex64>,
}

impl SectorGate {
    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn apply(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::from_element(psi.len(), c(0.0, 0.0));
        for (b, (&t, &p)) in self.target.iter().zip(&self.phase).enumerate() {
            out[t] += p * psi[b];
        }
        out
    }

    pub fn apply_adjoint(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_fn(psi.len(), |b, _| self.phase[b].conj() * psi[self.target[b]])
    }

    pub fn dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut g = DMatrix::from_element(n, n, c(0.0, 0.0));
        for (b, (&t, &p)) in self.target.iter().zip(&self.phase).enumerate() {
            g[(t, b)] = p;
        }
        g
    }

    /// `max |G^dag G - 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.dense();
        (g.adjoint() * &g - DMatrix::identity(self.dim(), self.dim())).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `G^dag H G` for real `H`, as split parts.
    pub fn conjugate(&self, h: &DMatrix<f64>) -> SplitMatrix {
        let n = self.dim();
        let mut out = SplitMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let z = self.phase[a].conj() * self.phase[b] * h[(self.target[a], self.target[b])];
                out.re[(a, b)] = z.re;
                out.im[(a, b)] = z.im;
            }
        }
        out
    }
}

/// `max |G^dag H G + H|`.
pub fn verify_sign_reversal(h: &DMatrix<f64>, gate: &SectorGate) -> Result<f64> {
    if h.nrows() != gate.dim() {
        return Err(Error::DimensionMismatch { expected: gate.dim(), found: h.nrows() });
    }
    let g = gate.conjugate(h);
    let mut worst: f64 = 0.0;
    for a in 0..h.nrows() {
        for b in 0..h.ncols() {
            worst = worst.max(c(g.re[(a, b)] + h[(a, b)], g.im[(a, b)]).norm());
        }
    }
    Ok(worst)
}
