//! Cross-checks against brute-force constructions that share no code with the library.

use nalgebra::{DMatrix, DVector};
use xxladder::linalg::Complex64;
use xxladder::otoc::{
    effective_dimension, eon_distribution, exact_otoc, haar_state, sampled_otoc, InitialState,
};
use xxladder::protocol::{sign_reversal_unitary, verify_sign_reversal};
use xxladder::spin::{
    build_hamiltonian, build_sector_basis, diagonalize, sample_disorder, sigma_z_operator, solve, DisorderLegs,
    DisorderRealization, LadderParams,
};
use xxladder::{fits, linalg};

type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// local bit basis: index 0 = down, 1 = up; rows are the output bit
fn sx() -> CMat {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}
fn sy() -> CMat {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)])
}
fn sz() -> CMat {
    DMatrix::from_row_slice(2, 2, &[c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)])
}

/// `op` on bit `k` of an `n`-bit register; the leftmost Kronecker factor is the top bit.
fn embed(op: &CMat, k: usize, n: usize) -> CMat {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for bit in (0..n).rev() {
        let f = if bit == k { op.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

fn full_space_hamiltonian(p: &LadderParams, d: &DisorderRealization) -> CMat {
    let l = p.sites;
    let n = 2 * l;
    let bit = |leg: usize, site: usize| (leg - 1) * l + site - 1;
    let dim = 1 << n;
    let mut h = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    let mut bond = |a: usize, b: usize, j: f64| {
        h += (embed(&sx(), a, n) * embed(&sx(), b, n) + embed(&sy(), a, n) * embed(&sy(), b, n)) * c(j, 0.0);
    };
    for leg in 1..=2 {
        for i in 1..l {
            bond(bit(leg, i), bit(leg, i + 1), p.j_par);
        }
    }
    for i in 1..=l {
        bond(bit(1, i), bit(2, i), p.alpha * p.j_par);
    }
    for leg in 1..=2 {
        for i in 1..=l {
            h += embed(&sz(), bit(leg, i), n) * c(d.field(leg, i), 0.0);
        }
    }
    h
}

fn sector_indices(l: usize) -> Vec<usize> {
    (0..1usize << (2 * l)).filter(|s| s.count_ones() as usize == l).collect()
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (cs, sn) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// `exp(m)` by scaling and squaring of a Taylor series.
fn expm(m: &CMat) -> CMat {
    let norm: f64 = m.iter().map(|z| z.norm()).sum();
    let s = (norm.max(1.0).log2().ceil() as i32 + 2).max(0);
    let a = m / c(2f64.powi(s), 0.0);
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn sector_hamiltonian_equals_full_space_restriction() {
    for (l, alpha, h, legs) in [(2, 1.0, 0.0, DisorderLegs::Shared), (3, 0.7, 2.0, DisorderLegs::Shared), (3, 1.4, 1.0, DisorderLegs::Independent)] {
        let p = LadderParams::new(l, alpha, h).unwrap().with_legs(legs);
        let d = sample_disorder(&p, 31);
        let full = full_space_hamiltonian(&p, &d);
        // total Sz commutes with the full-space Hamiltonian
        let n = 2 * l;
        let mut sz_tot = DMatrix::from_element(1 << n, 1 << n, c(0.0, 0.0));
        for k in 0..n {
            sz_tot += embed(&sz(), k, n);
        }
        assert!((&full * &sz_tot - &sz_tot * &full).iter().all(|z| z.norm() < 1e-12));

        let basis = build_sector_basis(l).unwrap();
        let sector = build_hamiltonian(&p, &d, &basis).unwrap();
        let idx = sector_indices(l);
        assert_eq!(idx.iter().map(|&s| s as u32).collect::<Vec<_>>(), basis.states());
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                let z = full[(a, b)];
                assert!(z.im.abs() < 1e-14);
                assert!((z.re - sector.matrix[(i, j)]).abs() < 1e-12, "L={l} ({i},{j})");
            }
        }
    }
}

#[test]
fn clean_plaquette_spectrum_matches_jacobi_oracle() {
    let p = LadderParams::new(2, 1.0, 0.0).unwrap();
    let b = build_sector_basis(2).unwrap();
    let ham = build_hamiltonian(&p, &DisorderRealization::clean(2), &b).unwrap();
    let eig = diagonalize(&ham).unwrap();
    let oracle = jacobi_eigenvalues(ham.matrix.clone());
    for (a, o) in eig.values.iter().zip(&oracle) {
        assert!((a - o).abs() < 1e-10);
    }
    let sum: f64 = eig.values.iter().sum();
    assert!(sum.abs() < 1e-10);
}

#[test]
fn decoupled_dimers_at_zero_rung() {
    let p = LadderParams::new(2, 0.0, 0.0).unwrap();
    let b = build_sector_basis(2).unwrap();
    let eig = solve(&p, &DisorderRealization::clean(2), &b).unwrap();
    // each XX dimer has levels {0, 0, -2, +2}; sector sums give {-4, 0, 0, 0, 0, 4}
    let expect = [-4.0, 0.0, 0.0, 0.0, 0.0, 4.0];
    for (a, e) in eig.values.iter().zip(expect) {
        assert!((a - e).abs() < 1e-12, "{:?}", eig.values);
    }
}

#[test]
fn leg_swap_leaves_spectrum_unchanged() {
    let p = LadderParams::new(4, 0.8, 3.0).unwrap().with_legs(DisorderLegs::Independent);
    let b = build_sector_basis(4).unwrap();
    let d = sample_disorder(&p, 12);
    let swapped = DisorderRealization { lower: d.upper.clone(), upper: d.lower.clone(), ..d.clone() };
    let e1 = solve(&p, &d, &b).unwrap().values;
    let e2 = solve(&p, &swapped, &b).unwrap().values;
    for (a, z) in e1.iter().zip(&e2) {
        assert!((a - z).abs() < 1e-9);
    }
}

#[test]
fn otoc_matches_explicit_commutator_at_l3() {
    let p = LadderParams::new(3, 1.0, 0.0).unwrap();
    let b = build_sector_basis(3).unwrap();
    let ham = build_hamiltonian(&p, &DisorderRealization::clean(3), &b).unwrap();
    let eig = diagonalize(&ham).unwrap();
    let (s3, s1) = (sigma_z_operator(&b, 1, 3).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
    let times = [0.5, 1.0, 2.0];
    let lib = exact_otoc(&eig, &s3, &s1, &times).unwrap();

    let n = b.dim();
    let hc: CMat = ham.matrix.map(|x| c(x, 0.0));
    let d1: CMat = DMatrix::from_diagonal(&DVector::from_iterator(n, s1.diag().iter().map(|&x| c(x, 0.0))));
    let d3: CMat = DMatrix::from_diagonal(&DVector::from_iterator(n, s3.diag().iter().map(|&x| c(x, 0.0))));
    for (k, &t) in times.iter().enumerate() {
        let u = expm(&(&hc * c(0.0, -t)));
        let w = u.adjoint() * &d3 * &u;
        let comm = &w * &d1 - &d1 * &w;
        let frob: f64 = comm.iter().map(|z| z.norm_sqr()).sum();
        let oracle = 1.0 - frob / (2.0 * n as f64);
        assert!((lib.values[k].re - oracle).abs() < 1e-9, "t={t}: {} vs {oracle}", lib.values[k].re);
    }
}

#[test]
fn complete_fock_average_is_exact_for_small_ladders() {
    let times = xxladder::time_grid::log_times(0.1, 1000.0, 20).unwrap();
    for l in 2..=4 {
        let p = LadderParams::new(l, 1.0, 1.0).unwrap();
        let b = build_sector_basis(l).unwrap();
        let eig = solve(&p, &sample_disorder(&p, 5), &b).unwrap();
        let (si, s1) = (sigma_z_operator(&b, 1, l).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
        let all: Vec<InitialState> = (0..b.dim()).map(|k| InitialState::basis(&b, k)).collect();
        let ex = exact_otoc(&eig, &si, &s1, &times).unwrap();
        let sm = sampled_otoc(&eig, &si, &s1, &all, &times).unwrap();
        let eps = fits::error_signal(&ex, &sm, fits::ErrorKind::Eps1).unwrap();
        assert!(eps.eps.iter().all(|&e| e <= 1e-9));
    }
}

#[test]
fn haar_overlaps_concentrate_at_inverse_dimension() {
    let b = build_sector_basis(4).unwrap();
    let n = b.dim() as f64;
    let overlaps: Vec<f64> = (0..100u64)
        .map(|k| linalg::inner(&haar_state(&b, 2 * k).amplitudes, &haar_state(&b, 2 * k + 1).amplitudes).norm_sqr())
        .collect();
    let mean = overlaps.iter().sum::<f64>() / 100.0;
    // |<a|b>|^2 ~ Beta(1, N-1): mean 1/N, variance (N-1)/(N^2 (N+1))
    let sigma = ((n - 1.0) / (n * n * (n + 1.0)) / 100.0).sqrt();
    assert!((mean - 1.0 / n).abs() < 3.0 * sigma, "mean {mean}, 1/N {}", 1.0 / n);
}

#[test]
fn eon_limits() {
    let p = LadderParams::new(3, 1.0, 1.0).unwrap();
    let b = build_sector_basis(3).unwrap();
    let eig = solve(&p, &sample_disorder(&p, 8), &b).unwrap();
    let n = b.dim();
    let v = DVector::from_fn(n, |i, _| c(eig.vectors[(i, 4)], 0.0));
    let e = eon_distribution(&eig, &InitialState::custom(v).unwrap()).unwrap();
    assert!((e.weights[4] - 1.0).abs() < 1e-12);
    assert!((effective_dimension(&e) - 1.0).abs() < 1e-10);

    let coeffs = DVector::from_element(n, c(1.0 / (n as f64).sqrt(), 0.0));
    let uniform = &eig.vectors * coeffs.map(|z| z.re);
    let e = eon_distribution(&eig, &InitialState::custom(uniform.map(|x| c(x, 0.0))).unwrap()).unwrap();
    assert!(e.weights.iter().all(|w| (w - 1.0 / n as f64).abs() < 1e-12));
    assert!((effective_dimension(&e) - n as f64).abs() < 1e-8);
    assert!((e.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
}

#[test]
fn random_fock_state_has_broad_eon_at_l6() {
    let p = LadderParams::new(6, 1.0, 1.0).unwrap();
    let b = build_sector_basis(6).unwrap();
    let eig = solve(&p, &sample_disorder(&p, 1), &b).unwrap();
    let e = eon_distribution(&eig, &xxladder::otoc::fock_state(&b, 3)).unwrap();
    let support = e.weights.iter().filter(|&&w| w > 1e-6).count();
    assert!(support * 2 > b.dim(), "support {support} of {}", b.dim());
    let de = effective_dimension(&e);
    assert!(de >= 1.0 && de <= b.dim() as f64);
}

#[test]
fn single_haar_state_tracks_exact_otoc() {
    let p = LadderParams::new(4, 1.0, 1.0).unwrap();
    let b = build_sector_basis(4).unwrap();
    let eig = solve(&p, &sample_disorder(&p, 2), &b).unwrap();
    let (si, s1) = (sigma_z_operator(&b, 1, 4).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
    let times = xxladder::time_grid::log_times(0.1, 1000.0, 60).unwrap();
    let ex = exact_otoc(&eig, &si, &s1, &times).unwrap();
    let sm = sampled_otoc(&eig, &si, &s1, &[haar_state(&b, 77)], &times).unwrap();
    let eps = fits::error_signal(&ex, &sm, fits::ErrorKind::Eps1).unwrap();
    // typical-state fluctuations are of order d^-1/2
    let scale = (b.dim() as f64).sqrt().recip();
    let max = eps.eps.iter().cloned().fold(0.0, f64::max);
    assert!(max < 4.0 * scale, "max {max}");
    assert!(eps.saturation_mean > 0.1 * scale && eps.saturation_mean < 2.5 * scale, "{}", eps.saturation_mean);
}

#[test]
fn pulse_sequence_matches_kronecker_construction_at_l3() {
    let l = 3;
    let n = 2 * l;
    let pi = std::f64::consts::PI;
    let rot = |s: CMat| DMatrix::identity(2, 2) * c((pi / 2.0).cos(), 0.0) - s * c(0.0, (pi / 2.0).sin());
    let (rx, rz) = (rot(sx()), rot(sz()));
    // per spin: Rx then Rz on (1, odd) and (2, even), Rx alone elsewhere
    let mut full = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for bit in (0..n).rev() {
        let (leg, site) = (bit / l + 1, bit % l + 1);
        let with_z = (leg == 1 && site % 2 == 1) || (leg == 2 && site % 2 == 0);
        let local = if with_z { &rz * &rx } else { rx.clone() };
        full = full.kronecker(&local);
    }
    let seq = sign_reversal_unitary(l).unwrap();
    let lib_full = seq.full_unitary().unwrap();
    assert!((&lib_full - &full).iter().all(|z| z.norm() < 1e-12));

    let b = build_sector_basis(l).unwrap();
    let g = seq.sector_gate(&b).unwrap().dense();
    let idx = sector_indices(l);
    for (i, &a) in idx.iter().enumerate() {
        for (j, &bb) in idx.iter().enumerate() {
            assert!((full[(a, bb)] - g[(i, j)]).norm() < 1e-12);
        }
    }
    // and it reverses the full-space Hamiltonian too
    let p = LadderParams::new(l, 1.0, 1.0).unwrap();
    let h = full_space_hamiltonian(&p, &sample_disorder(&p, 4));
    assert!((full.adjoint() * &h * &full + &h).iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn sign_reversal_holds_across_sizes() {
    for l in 2..=6 {
        for &alpha in &[0.5, 1.0, 2.0] {
            let p = LadderParams::new(l, alpha, 1.0).unwrap();
            let b = build_sector_basis(l).unwrap();
            let g = sign_reversal_unitary(l).unwrap().sector_gate(&b).unwrap();
            for seed in 0..4 {
                let h = build_hamiltonian(&p, &sample_disorder(&p, seed), &b).unwrap();
                assert!(verify_sign_reversal(&h.matrix, &g).unwrap() <= 1e-10);
            }
        }
    }
}
