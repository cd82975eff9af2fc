//! Large-ladder checks (L = 7, 8). A single L = 7 realization takes about a
//! minute on one core and L = 8 needs several GB per dense matrix, so these are
//! opt-in: `cargo test --release -p xxladder-core --test large_ladders -- --ignored`.

use xxladder::fits::{self, fit_exponential, fit_mbl_form, fit_power_law, MblFitOptions};
use xxladder::otoc::exact_otoc_projected;
use xxladder::spin::{build_sector_basis, disorder_ensemble, sigma_z_operator, solve, LadderParams};
use xxladder::time_grid::{linear_times, log_times};

fn ensemble_otoc(l: usize, h: f64, probe: usize, realizations: usize, times: &[f64]) -> Vec<f64> {
    let p = LadderParams::new(l, 1.0, h).unwrap();
    let b = build_sector_basis(l).unwrap();
    let (si, s1) = (sigma_z_operator(&b, 1, probe).unwrap(), sigma_z_operator(&b, 1, 1).unwrap());
    let mut mean = vec![0.0; times.len()];
    for d in disorder_ensemble(&p, 2024, realizations) {
        let eig = solve(&p, &d, &b).unwrap();
        let f = exact_otoc_projected(&eig, &si, &s1, times).unwrap();
        for (m, v) in mean.iter_mut().zip(f.real()) {
            *m += v / realizations as f64;
        }
    }
    mean
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

#[test]
#[ignore = "L=7 ensemble, tens of minutes"]
fn early_exponential_decay_l7() {
    let t = linear_times(0.0, 6.0, 121).unwrap();
    let f = ensemble_otoc(7, 1.0, 5, 20, &t);
    let w = fits::onset_window(&t, &f, 2.0).unwrap();
    let r = fit_exponential(&t, &f, w).unwrap();
    assert!(within(r.param("lambda"), 1.4342, 0.15), "lambda {}", r.param("lambda"));
    assert!(r.r_squared >= 0.99);
}

#[test]
#[ignore = "L=8 needs several GB per dense matrix and hours of CPU"]
fn early_exponential_decay_l8() {
    let t = linear_times(0.0, 6.0, 61).unwrap();
    let f = ensemble_otoc(8, 1.0, 8, 3, &t);
    let w = fits::onset_window(&t, &f, 4.0).unwrap();
    let r = fit_exponential(&t, &f, w).unwrap();
    assert!(within(r.param("lambda"), 1.015, 0.15), "lambda {}", r.param("lambda"));
}

#[test]
#[ignore = "L=7 ensemble, tens of minutes"]
fn intermediate_power_law_l7() {
    let t = log_times(0.1, 20.0, 80).unwrap();
    let f = ensemble_otoc(7, 1.0, 7, 20, &t);
    let w = fits::half_decay_window(&t, &f, 6.0).unwrap();
    let r = fit_power_law(&t, &f, w).unwrap();
    assert!(within(r.param("b"), 2.6565, 0.15), "b {}", r.param("b"));
}

#[test]
#[ignore = "L=7 clean ladder, minutes"]
fn clean_power_law_l7() {
    let t = log_times(0.1, 20.0, 80).unwrap();
    let f = ensemble_otoc(7, 0.0, 7, 1, &t);
    let w = fits::half_decay_window(&t, &f, 10.0).unwrap();
    let r = fit_power_law(&t, &f, w).unwrap();
    assert!(within(r.param("b"), 2.76, 0.15), "b {}", r.param("b"));
}

#[test]
#[ignore = "L=7 ensembles at two disorder strengths, tens of minutes"]
fn stretched_mbl_decay_l7() {
    let t = log_times(0.1, 1000.0, 60).unwrap();
    for (h, a, b, c) in [(5.0, 0.725, 5.727, -0.812), (10.0, 0.154, 8.661, -0.519)] {
        let f = ensemble_otoc(7, h, 7, 20, &t);
        let r = fit_mbl_form(&t, &f, &MblFitOptions::default()).unwrap();
        assert!(within(r.param("a"), a, 0.25), "h={h} a {}", r.param("a"));
        assert!(within(r.param("b"), b, 0.25), "h={h} b {}", r.param("b"));
        assert!(within(r.param("c"), c, 0.25), "h={h} c {}", r.param("c"));
    }
}
