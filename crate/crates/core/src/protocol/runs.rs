use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::gates::{sign_reversal_unitary, SectorGate};
use crate::error::{Error, Result};
use crate::linalg::{self, Complex64};
use crate::otoc::{otoc_expectation, InitialState};
use crate::spin::{evolve_state, sigma_z_operator, EigenSystem, SectorBasis, SigmaZ};

/// One diagonalized realization together with its sign-reversal gate.
pub struct ProtocolSetup<'a> {
    pub eig: &'a EigenSystem,
    pub basis: &'a SectorBasis,
    pub gate: SectorGate,
}

impl<'a> ProtocolSetup<'a> {
    pub fn new(eig: &'a EigenSystem, basis: &'a SectorBasis) -> Result<Self> {
        if eig.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: eig.dim() });
        }
        let gate = sign_reversal_unitary(basis.sites())?.sector_gate(basis)?;
        Ok(Self { eig, basis, gate })
    }

    fn lower_leg(&self, site: usize) -> Result<SigmaZ> {
        sigma_z_operator(self.basis, 1, site)
    }
}

/// `U(-tau) = G^dag U(tau) G`, valid because `G^dag H G = -H`.
pub fn backward_evolve(eig: &EigenSystem, gate: &SectorGate, psi: &DVector<Complex64>, tau: f64) -> Result<DVector<Complex64>> {
    Ok(gate.apply_adjoint(&evolve_state(eig, &gate.apply(psi), tau)?))
}

/// `R_z(pi) = -i sigma^z` on one spin.
fn z_pulse(op: &SigmaZ, psi: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_fn(psi.len(), |b, _| psi[b] * Complex64::new(0.0, -op.diag()[b]))
}

fn check_state(setup: &ProtocolSetup, psi: &DVector<Complex64>) -> Result<()> {
    if psi.len() != setup.eig.dim() {
        return Err(Error::DimensionMismatch { expected: setup.eig.dim(), found: psi.len() });
    }
    let norm = linalg::norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Result of the two-copy protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interference {
    /// `Tr(rho_f1 rho_f2) = |<psi_f1|psi_f2>|^2`.
    pub overlap_sq: f64,
    /// Copy fidelity `Tr(rho_j^2)` of the prepared state.
    pub purity: f64,
}

/// Two copies of `psi`; copy 1 gets `U(-t) sz_i U(t) sz_1`, copy 2 gets
/// `sz_1 U(-t) sz_i U(t)`; backward evolution goes through the pulse sequence.
pub fn run_interference(setup: &ProtocolSetup, state: &InitialState, site_i: usize, t: f64) -> Result<Interference> {
    let psi = &state.amplitudes;
    check_state(setup, psi)?;
    let (s1, si) = (setup.lower_leg(1)?, setup.lower_leg(site_i)?);
    let purity = linalg::inner(psi, psi).norm_sqr();

    let mut f1 = z_pulse(&s1, psi);
    f1 = evolve_state(setup.eig, &f1, t)?;
    f1 = z_pulse(&si, &f1);
    f1 = backward_evolve(setup.eig, &setup.gate, &f1, t)?;

    let mut f2 = evolve_state(setup.eig, psi, t)?;
    f2 = z_pulse(&si, &f2);
    f2 = backward_evolve(setup.eig, &setup.gate, &f2, t)?;
    f2 = z_pulse(&s1, &f2);

    Ok(Interference { overlap_sq: linalg::inner(&f1, &f2).norm_sqr(), purity })
}

/// How the second controlled gate of the interferometric protocol is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferometricPath {
    /// `sigma^x_c`, gate controlled on `|1>`, `sigma^x_c`.
    Literal,
    /// Gate controlled on `|0>` directly.
    Direct,
}

/// Control-qubit readout of the interferometric protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferometric {
    /// `<sigma^x_c> = Re F_j`
    pub sigma_x: f64,
    /// `<sigma^y_c> = Im F_j`
    pub sigma_y: f64,
    /// Trace of the control's reduced state.
    pub control_trace: f64,
}

/// System plus control qubit, stored as the two control branches.
struct Doubled {
    zero: DVector<Complex64>,
    one: DVector<Complex64>,
}

impl Doubled {
    fn flip_control(&mut self) {
        std::mem::swap(&mut self.zero, &mut self.one);
    }

    fn both(&mut self, f: impl Fn(&DVector<Complex64>) -> DVector<Complex64>) {
        self.zero = f(&self.zero);
        self.one = f(&self.one);
    }
}

/// Control in `(|0> + |1>)/sqrt 2`; controlled `sz_1`; `U(t)`; `sz_i`; `U(-t)`;
/// `sz_1` conditioned on control `|0>`; then `<sigma^x_c>` and `<sigma^y_c>`.
pub fn run_interferometric(
    setup: &ProtocolSetup,
    state: &InitialState,
    site_i: usize,
    t: f64,
    path: InterferometricPath,
) -> Result<Interferometric> {
    let psi = &state.amplitudes;
    check_state(setup, psi)?;
    let (s1, si) = (setup.lower_leg(1)?, setup.lower_leg(site_i)?);
    let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    let mut st = Doubled { zero: psi * h, one: psi * h };

    st.one = z_pulse(&s1, &st.one);
    // branches carry norm 1/sqrt 2, so evolution skips the normalization contract
    st.both(|v| setup.eig.propagate(v, t));
    st.both(|v| z_pulse(&si, v));
    st.both(|v| setup.gate.apply_adjoint(&setup.eig.propagate(&setup.gate.apply(v), t)));
    match path {
        InterferometricPath::Literal => {
            st.flip_control();
            st.one = z_pulse(&s1, &st.one);
            st.flip_control();
        }
        InterferometricPath::Direct => st.zero = z_pulse(&s1, &st.zero),
    }

    let cross = linalg::inner(&st.zero, &st.one);
    let control_trace = linalg::inner(&st.zero, &st.zero).re + linalg::inner(&st.one, &st.one).re;
    Ok(Interferometric { sigma_x: 2.0 * cross.re, sigma_y: 2.0 * cross.im, control_trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Interference,
    Interferometric(InterferometricPath),
}

/// A protocol evaluated on a time grid next to the OTOC it should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub protocol: Protocol,
    pub initial_state: InitialState,
    pub site_i: usize,
    pub times: Vec<f64>,
    /// `|F_j|^2` (interference) or `Re F_j` (interferometric).
    pub outputs: Vec<f64>,
    /// `Im F_j` from `<sigma^y_c>`; interferometric only.
    pub imag_outputs: Option<Vec<f64>>,
    /// `F_j(t)` from the sampled-OTOC code path.
    pub reference: Vec<Complex64>,
    pub max_deviation: f64,
}

pub fn protocol_run(
    setup: &ProtocolSetup,
    state: &InitialState,
    site_i: usize,
    times: &[f64],
    protocol: Protocol,
) -> Result<ProtocolRun> {
    let (s1, si) = (setup.lower_leg(1)?, setup.lower_leg(site_i)?);
    let mut outputs = Vec::with_capacity(times.len());
    let mut imag = Vec::new();
    let mut reference = Vec::with_capacity(times.len());
    let mut worst: f64 = 0.0;
    for &t in times {
        let f = otoc_expectation(setup.eig, &si, &s1, &state.amplitudes, t)?;
        reference.push(f);
        match protocol {
            Protocol::Interference => {
                let out = run_interference(setup, state, site_i, t)?.overlap_sq;
                worst = worst.max((out - f.norm_sqr()).abs());
                outputs.push(out);
            }
            Protocol::Interferometric(path) => {
                let out = run_interferometric(setup, state, site_i, t, path)?;
                worst = worst.max((out.sigma_x - f.re).abs()).max((out.sigma_y - f.im).abs());
                outputs.push(out.sigma_x);
                imag.push(out.sigma_y);
            }
        }
    }
    Ok(ProtocolRun {
        protocol,
        initial_state: state.clone(),
        site_i,
        times: times.to_vec(),
        outputs,
        imag_outputs: matches!(protocol, Protocol::Interferometric(_)).then_some(imag),
        reference,
        max_deviation: worst,
    })
}
