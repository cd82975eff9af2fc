use nalgebra::DVector;

use super::states::{InitialState, StateKind};
use super::{check_dims, Estimator, OtocMeta, OtocSeries};
use crate::error::{Error, Result};
use crate::linalg::{self, Complex64, SplitMatrix};
use crate::spin::{EigenSystem, SigmaZ};

/// `U^dag D_i U D_1 U^dag D_i U D_1` applied column-wise to `block`.
fn sandwich(eig: &EigenSystem, op_i: &SigmaZ, op_1: &SigmaZ, block: &SplitMatrix, t: f64) -> SplitMatrix {
    let mut x = block.clone();
    for _ in 0..2 {
        x.scale_rows(op_1.diag());
        x = eig.evolve_block(&x, t);
        x.scale_rows(op_i.diag());
        x = eig.evolve_block(&x, -t);
    }
    x
}

/// `F_j(t) = <psi| sz_i(t) sz_1 sz_i(t) sz_1 |psi>` for a single state.
pub fn otoc_expectation(
    eig: &EigenSystem,
    op_i: &SigmaZ,
    op_1: &SigmaZ,
    psi: &DVector<Complex64>,
    t: f64,
) -> Result<Complex64> {
    check_dims(eig.dim(), &[op_i.dim(), op_1.dim(), psi.len()])?;
    let norm = linalg::norm(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let block = SplitMatrix::from_columns(psi.len(), [psi]);
    let out = sandwich(eig, op_i, op_1, &block, t);
    Ok(SplitMatrix::column_overlaps(&block, &out)[0])
}

/// Mean of `F_j(t)` over the supplied states; per-state rows go to `per_sample`.
///
/// Heisenberg operators are never formed: every state is pushed through the
/// eight-step sandwich, with all states batched into one block per time point.
pub fn sampled_otoc(
    eig: &EigenSystem,
    op_i: &SigmaZ,
    op_1: &SigmaZ,
    states: &[InitialState],
    times: &[f64],
) -> Result<OtocSeries> {
    if states.is_empty() {
        return Err(Error::Empty("initial state list"));
    }
    let dims: Vec<usize> = [op_i.dim(), op_1.dim()].into_iter().chain(states.iter().map(|s| s.amplitudes.len())).collect();
    check_dims(eig.dim(), &dims)?;
    for s in states {
        let norm = linalg::norm(&s.amplitudes);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
    }
    let block = SplitMatrix::from_columns(eig.dim(), states.iter().map(|s| &s.amplitudes));
    let m = states.len();
    let mut per_sample = vec![Vec::with_capacity(times.len()); m];
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let out = sandwich(eig, op_i, op_1, &block, t);
        let f = SplitMatrix::column_overlaps(&block, &out);
        values.push(f.iter().sum::<Complex64>() / m as f64);
        for (row, v) in per_sample.iter_mut().zip(f) {
            row.push(v);
        }
    }

    let kind = states[0].kind;
    let estimator = match kind {
        _ if states.iter().any(|s| s.kind != kind) => Estimator::Custom,
        StateKind::Haar => Estimator::Haar,
        StateKind::Fock => Estimator::Fock,
        StateKind::Custom => Estimator::Custom,
    };
    let meta = OtocMeta {
        params: eig.params,
        pair: (op_i.label(), op_1.label()),
        estimator,
        dim: eig.dim(),
        samples: m,
        realizations: 1,
        seeds: eig.seed.into_iter().chain(states.iter().filter_map(|s| s.seed)).collect(),
        cross_check: None,
    };
    Ok(OtocSeries { times: times.to_vec(), values, per_sample: Some(per_sample), meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::otoc::{exact_otoc, fock_state, haar_state};
    use crate::spin::{build_sector_basis, sigma_z_operator, solve, sample_disorder, LadderParams};

    #[test]
    fn single_state_is_one_at_zero_time() {
        let p = LadderParams::new(3, 1.0, 1.0).unwrap();
        let b = build_sector_basis(3).unwrap();
        let eig = solve(&p, &sample_disorder(&p, 2), &b).unwrap();
        let (si, s1) = (sigma_z_operator(&b, 1, 3).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
        let st = [haar_state(&b, 5), fock_state(&b, 6)];
        let s = sampled_otoc(&eig, &si, &s1, &st, &[0.0]).unwrap();
        for row in s.per_sample.unwrap() {
            assert!((row[0] - Complex64::from(1.0)).norm() < 1e-12);
        }
        assert_eq!(s.meta.estimator, Estimator::Custom);
    }

    #[test]
    fn full_fock_basis_reproduces_exact() {
        let p = LadderParams::new(3, 1.0, 1.0).unwrap();
        let b = build_sector_basis(3).unwrap();
        let eig = solve(&p, &sample_disorder(&p, 4), &b).unwrap();
        let (si, s1) = (sigma_z_operator(&b, 1, 2).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
        let all: Vec<InitialState> = (0..b.dim()).map(|k| InitialState::basis(&b, k)).collect();
        let times = [0.1, 1.0, 3.0, 30.0];
        let s = sampled_otoc(&eig, &si, &s1, &all, &times).unwrap();
        let e = exact_otoc(&eig, &si, &s1, &times).unwrap();
        for k in 0..times.len() {
            assert!((s.values[k] - e.values[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn global_phase_invariance() {
        let p = LadderParams::new(3, 1.0, 1.0).unwrap();
        let b = build_sector_basis(3).unwrap();
        let eig = solve(&p, &sample_disorder(&p, 1), &b).unwrap();
        let (si, s1) = (sigma_z_operator(&b, 1, 3).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
        let psi = haar_state(&b, 3).amplitudes;
        let rotated = &psi * Complex64::from_polar(1.0, 0.77);
        let a = otoc_expectation(&eig, &si, &s1, &psi, 2.0).unwrap();
        let c = otoc_expectation(&eig, &si, &s1, &rotated, 2.0).unwrap();
        assert!((a - c).norm() < 1e-12);
    }

    #[test]
    fn empty_list_rejected() {
        let p = LadderParams::new(2, 1.0, 1.0).unwrap();
        let b = build_sector_basis(2).unwrap();
        let eig = solve(&p, &sample_disorder(&p, 1), &b).unwrap();
        let s = sigma_z_operator(&b, 1, 1).unwrap();
        assert!(matches!(sampled_otoc(&eig, &s, &s, &[], &[0.0]), Err(Error::Empty(_))));
    }
}
