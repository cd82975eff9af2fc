use proptest::prelude::*;
use xxladder::fits::{fit_error_scaling, fit_exponential, fit_mbl_form, fit_power_law, FitForm, MblFitOptions, Window};
use xxladder::level_stats::gap_ratios;
use xxladder::linalg::{self, Complex64};
use xxladder::otoc::{haar_state, otoc_expectation};
use xxladder::protocol::{sign_reversal_unitary, verify_sign_reversal};
use xxladder::spin::{
    build_hamiltonian, build_sector_basis, diagonalize, evolve_state, sample_disorder, sigma_z_operator, DisorderLegs,
    LadderParams,
};
use xxladder::time_grid::{linear_times, log_times};
use xxladder::wavefront::{extract_contour, fit_dynamical_exponent, WavefrontGrid};

fn legs() -> impl Strategy<Value = DisorderLegs> {
    prop_oneof![Just(DisorderLegs::Shared), Just(DisorderLegs::Independent)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_invariants(l in 2usize..=4, alpha in 0.0f64..5.0, h in 0.0f64..10.0, seed: u64, legs in legs()) {
        let p = LadderParams::new(l, alpha, h).unwrap().with_legs(legs);
        let b = build_sector_basis(l).unwrap();
        let d = sample_disorder(&p, seed);
        prop_assert!(d.max_abs() <= h);
        let ham = build_hamiltonian(&p, &d, &b).unwrap();
        prop_assert!(ham.max_asymmetry() <= 1e-12);
        let eig = diagonalize(&ham).unwrap();
        prop_assert!(eig.reconstruction_error(&ham.matrix) <= 1e-9 * ham.max_abs().max(1.0));
        prop_assert!(eig.orthogonality_error() <= 1e-10);
        let g = sign_reversal_unitary(l).unwrap().sector_gate(&b).unwrap();
        prop_assert!(verify_sign_reversal(&ham.matrix, &g).unwrap() <= 1e-10);
    }

    #[test]
    fn evolution_is_unitary(seed: u64, t in -1000.0f64..1000.0) {
        let p = LadderParams::new(3, 1.0, 1.0).unwrap();
        let b = build_sector_basis(3).unwrap();
        let eig = diagonalize(&build_hamiltonian(&p, &sample_disorder(&p, seed), &b).unwrap()).unwrap();
        let psi = haar_state(&b, seed ^ 1).amplitudes;
        let out = evolve_state(&eig, &psi, t).unwrap();
        prop_assert!((linalg::norm(&out) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn otoc_is_phase_invariant_and_bounded(seed: u64, phase in 0.0f64..6.3, t in 0.0f64..50.0) {
        let p = LadderParams::new(3, 1.0, 2.0).unwrap();
        let b = build_sector_basis(3).unwrap();
        let eig = diagonalize(&build_hamiltonian(&p, &sample_disorder(&p, seed), &b).unwrap()).unwrap();
        let (si, s1) = (sigma_z_operator(&b, 2, 2).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
        let psi = haar_state(&b, seed).amplitudes;
        let a = otoc_expectation(&eig, &si, &s1, &psi, t).unwrap();
        let c = otoc_expectation(&eig, &si, &s1, &(&psi * Complex64::from_polar(1.0, phase)), t).unwrap();
        prop_assert!((a - c).norm() <= 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn log_space_fits_are_exact(a in 0.1f64..10.0, k in 0.1f64..3.0) {
        let t = linear_times(0.0, 3.0, 12).unwrap();
        let f: Vec<f64> = t.iter().map(|x| a * (-k * x).exp()).collect();
        let r = fit_exponential(&t, &f, Window::ALL).unwrap();
        prop_assert!((r.param("lambda") - k).abs() < 1e-9 && (r.param("a") - a).abs() < 1e-9 * a);
        prop_assert!((r.r_squared - 1.0).abs() < 1e-9);

        let t = log_times(0.5, 50.0, 12).unwrap();
        let f: Vec<f64> = t.iter().map(|x| a * x.powf(-k)).collect();
        let r = fit_power_law(&t, &f, Window::ALL).unwrap();
        prop_assert!((r.param("b") - k).abs() < 1e-9);
        prop_assert!(r.residuals.iter().all(|e| e.abs() < 1e-9));

        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, a * (i as f64).powf(-k))).collect();
        let r = fit_error_scaling(&pts, FitForm::ScalingPower).unwrap();
        prop_assert!((r.param("b") + k).abs() < 1e-9);
    }

    #[test]
    fn fit_ignores_point_order(seed: u64) {
        use rand::seq::SliceRandom;
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 1.0 / (i as f64) + 0.01 * (i % 3) as f64)).collect();
        let mut shuffled = pts.clone();
        shuffled.shuffle(&mut xxladder::rng::seeded(seed));
        let a = fit_error_scaling(&pts, FitForm::ScalingPower).unwrap();
        let b = fit_error_scaling(&shuffled, FitForm::ScalingPower).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gap_ratios_are_affine_invariant(mut e in prop::collection::vec(-100.0f64..100.0, 3..40), scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        e.sort_by(f64::total_cmp);
        let base = gap_ratios(&e).unwrap();
        let moved: Vec<f64> = e.iter().map(|x| scale * x + shift).collect();
        let r = gap_ratios(&moved).unwrap();
        prop_assert!(base.ratios.iter().all(|x| (0.0..=1.0).contains(x)));
        if base.dropped == 0 && r.dropped == 0 {
            for (x, y) in base.ratios.iter().zip(&r.ratios) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn contour_exponent_is_scale_free(speed in 0.2f64..5.0, gamma in 0.3f64..2.0) {
        // F(dx, t) = exp(-(t speed)^gamma / dx): crossing t = (-dx ln eta)^(1/gamma) / speed
        let times = linear_times(0.0, 200.0, 40001).unwrap();
        let rows: Vec<Vec<f64>> = (1..=5).map(|d| times.iter().map(|&t| (-(t * speed).powf(gamma) / d as f64).exp()).collect()).collect();
        let g = WavefrontGrid::from_profiles(LadderParams::new(6, 1.0, 0.0).unwrap(), vec![], times, vec![rows]).unwrap();
        let c = extract_contour(&g, 0.5).unwrap();
        prop_assume!(c.never_crossed.is_empty());
        let fit = fit_dynamical_exponent(&c, 1).unwrap();
        prop_assert!((fit.param("b") - gamma).abs() < 2e-2, "{} vs {}", fit.param("b"), gamma);
    }
}

#[test]
fn mbl_fit_from_defaults_over_parameter_range() {
    let t = log_times(0.1, 1000.0, 60).unwrap();
    for &(a, b, c) in &[(0.7, 5.0, -0.8), (0.3, 2.0, -0.4), (0.9, 8.0, -1.2)] {
        let f: Vec<f64> = t.iter().map(|x| 1.0 - a * (-b * x.powf(c)).exp()).collect();
        let r = fit_mbl_form(&t, &f, &MblFitOptions::default()).unwrap();
        assert!((r.param("a") - a).abs() < 0.01 * a);
        assert!((r.param("b") - b).abs() < 0.01 * b);
        assert!((r.param("c") - c).abs() < 0.01 * c.abs());
    }
}
