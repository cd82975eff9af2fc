use nalgebra::{Matrix3, Vector3};

use super::linear::{least_squares, log_pairs, result, span};
use super::{FitForm, FitResult, Window};
use crate::error::{Error, Result};

fn windowed(t: &[f64], y: &[f64], window: Window, needed: usize) -> Result<Vec<(f64, f64)>> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: t.len(), found: y.len() });
    }
    let pts: Vec<(f64, f64)> = t.iter().zip(y).filter(|(x, _)| window.contains(**x)).map(|(&x, &v)| (x, v)).collect();
    if pts.len() < needed {
        return Err(Error::TooFewPoints { needed, got: pts.len() });
    }
    Ok(pts)
}

/// `F = a exp(-lambda t)` by least squares on `(t, ln F)`.
pub fn fit_exponential(t: &[f64], f: &[f64], window: Window) -> Result<FitResult> {
    let pts = windowed(t, f, window, 4)?;
    let fit = least_squares(&log_pairs(&pts, false)?)?;
    let (a, lambda) = (fit.intercept.exp(), -fit.slope);
    result(FitForm::Exp, &[("a", a), ("lambda", lambda)], fit, span(&pts), pts.len(), "ln F vs t")
}

/// `F = a t^-b` by least squares on `(ln t, ln F)`.
pub fn fit_power_law(t: &[f64], f: &[f64], window: Window) -> Result<FitResult> {
    let pts = windowed(t, f, window, 4)?;
    let fit = least_squares(&log_pairs(&pts, true)?)?;
    let (a, b) = (fit.intercept.exp(), -fit.slope);
    result(FitForm::Power, &[("a", a), ("b", b)], fit, span(&pts), pts.len(), "ln F vs ln t")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MblFitOptions {
    /// Starting guesses `(a, b, c)`; each needs `c < 0`.
    pub starts: Vec<(f64, f64, f64)>,
    pub max_iterations: usize,
    /// Minimum time span in decades.
    pub min_decades: f64,
}

impl Default for MblFitOptions {
    fn default() -> Self {
        let mut starts = Vec::new();
        for a in [0.2, 0.5, 0.9] {
            for b in [1.0, 5.0, 10.0] {
                for c in [-0.3, -0.8, -1.5] {
                    starts.push((a, b, c));
                }
            }
        }
        Self { starts, max_iterations: 500, min_decades: 2.0 }
    }
}

// model 1 - a exp(-b t^c) with c = -exp(u)
fn model(p: &Vector3<f64>, t: f64) -> (f64, Vector3<f64>) {
    let (a, b, c) = (p[0], p[1], -p[2].exp());
    let s = t.powf(c);
    let e = (-b * s).exp();
    let grad = Vector3::new(-e, a * e * s, a * b * e * s * t.ln() * c);
    (1.0 - a * e, grad)
}

fn rss(p: &Vector3<f64>, pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|&(t, y)| (y - model(p, t).0).powi(2)).sum()
}

/// Returns the final parameters, residual sum of squares and whether the
/// iteration settled before the iteration cap.
fn levenberg_marquardt(start: Vector3<f64>, pts: &[(f64, f64)], max_iterations: usize) -> (Vector3<f64>, f64, bool) {
    let mut p = start;
    let mut cost = rss(&p, pts);
    let mut damping = 1e-3;
    for _ in 0..max_iterations {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for &(t, y) in pts {
            let (m, g) = model(&p, t);
            jtj += g * g.transpose();
            jtr += g * (y - m);
        }
        let mut improved = false;
        while damping < 1e12 {
            let mut lhs = jtj;
            for k in 0..3 {
                lhs[(k, k)] += damping * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = lhs.lu().solve(&jtr) else {
                damping *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = rss(&trial, pts);
            if trial_cost.is_finite() && trial_cost < cost {
                let settled = (cost - trial_cost) <= 1e-14 * cost.max(1e-300) || step.norm() <= 1e-12 * (1.0 + p.norm());
                p = trial;
                cost = trial_cost;
                damping = (damping / 10.0).max(1e-12);
                improved = true;
                if settled {
                    return (p, cost, true);
                }
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: a stationary point
            return (p, cost, cost.is_finite());
        }
    }
    (p, cost, false)
}

/// Fits `F = 1 - a exp(-b t^c)` with `c = -e^u < 0`, keeping the best of several starts.
pub fn fit_mbl_form(t: &[f64], f: &[f64], options: &MblFitOptions) -> Result<FitResult> {
    let pts = windowed(t, f, Window::new(f64::MIN_POSITIVE, f64::INFINITY), 4)?;
    let (lo, hi) = span(&pts);
    let decades = (hi / lo).log10();
    if decades < options.min_decades {
        return Err(Error::ShortSpan { decades, needed: options.min_decades });
    }
    let mut best: Option<(Vector3<f64>, f64)> = None;
    let mut best_any = f64::INFINITY;
    for &(a, b, c) in &options.starts {
        if c >= 0.0 {
            continue;
        }
        let (p, cost, converged) = levenberg_marquardt(Vector3::new(a, b, (-c).ln()), &pts, options.max_iterations);
        best_any = best_any.min(cost);
        if converged && p.iter().all(|v| v.is_finite()) && best.map_or(true, |(_, c0)| cost < c0) {
            best = Some((p, cost));
        }
    }
    let (p, cost) = best.ok_or(Error::FitFailed { starts: options.starts.len(), best_rss: best_any })?;
    let c = -p[2].exp();
    let mean = pts.iter().map(|q| q.1).sum::<f64>() / pts.len() as f64;
    let ss_tot: f64 = pts.iter().map(|q| (q.1 - mean).powi(2)).sum();
    let residuals = pts.iter().map(|&(t, y)| y - model(&p, t).0).collect();
    Ok(FitResult {
        form: FitForm::Mbl,
        params: [("a", p[0]), ("b", p[1]), ("c", c)].iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        r_squared: if ss_tot > 0.0 { 1.0 - cost / ss_tot } else { 1.0 },
        window: (lo, hi),
        n_points: pts.len(),
        coordinates: "F vs t".into(),
        residuals,
    })
}

/// Centre `b^(-1/c)` of the logarithmic regime and the slope `a c / e` of
/// `F ~ 1 - a/e + (a c / e) ln(b^(1/c) t)` there.
pub fn logarithmic_window(fit: &FitResult) -> Result<(f64, f64)> {
    fit.expect_form(FitForm::Mbl)?;
    let (a, b, c) = (fit.param("a"), fit.param("b"), fit.param("c"));
    Ok((b.powf(-1.0 / c), a * c / std::f64::consts::E))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time_grid::log_times;

    #[test]
    fn exponential_recovery() {
        let t: Vec<f64> = (0..20).map(|k| 0.1 * k as f64).collect();
        let f: Vec<f64> = t.iter().map(|x| 2.0 * (-1.3 * x).exp()).collect();
        let r = fit_exponential(&t, &f, Window::ALL).unwrap();
        assert!((r.param("a") - 2.0).abs() < 1e-12 && (r.param("lambda") - 1.3).abs() < 1e-12);
        assert!(r.r_squared > 0.9999);
    }

    #[test]
    fn power_recovery_and_window() {
        let t = log_times(0.1, 100.0, 30).unwrap();
        let f: Vec<f64> = t.iter().map(|x| 5.0 * x.powf(-2.5)).collect();
        let r = fit_power_law(&t, &f, Window::new(1.0, 50.0)).unwrap();
        assert!((r.param("b") - 2.5).abs() < 1e-12);
        assert!(r.window.0 >= 1.0 && r.window.1 <= 50.0);
        assert!(matches!(fit_power_law(&t, &f, Window::new(1.0, 1.1)), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn nonpositive_in_window() {
        let t = [1.0, 2.0, 3.0, 4.0, 5.0];
        let f = [0.5, 0.3, -0.1, 0.1, 0.05];
        assert!(matches!(fit_exponential(&t, &f, Window::ALL), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn mbl_recovery() {
        let t = log_times(0.1, 1000.0, 60).unwrap();
        let f: Vec<f64> = t.iter().map(|x| 1.0 - 0.7 * (-5.0 * x.powf(-0.8)).exp()).collect();
        let r = fit_mbl_form(&t, &f, &MblFitOptions::default()).unwrap();
        assert!((r.param("a") - 0.7).abs() < 0.007);
        assert!((r.param("b") - 5.0).abs() < 0.05);
        assert!((r.param("c") + 0.8).abs() < 0.008);
        // fitted curve starts at 1 and decays monotonically
        assert!((r.predict(1e-6) - 1.0).abs() < 1e-9);
        let g = log_times(1e-3, 1e4, 50).unwrap();
        assert!(g.windows(2).all(|w| r.predict(w[1]) <= r.predict(w[0]) + 1e-15));
    }

    #[test]
    fn mbl_requires_two_decades() {
        let t = log_times(1.0, 50.0, 20).unwrap();
        let f: Vec<f64> = t.iter().map(|x| 1.0 - 0.5 * (-2.0 * x.powf(-0.5)).exp()).collect();
        assert!(matches!(fit_mbl_form(&t, &f, &MblFitOptions::default()), Err(Error::ShortSpan { .. })));
    }

    #[test]
    fn log_window() {
        let mut r = FitResult {
            form: FitForm::Mbl,
            params: [("a", 0.725), ("b", 5.727), ("c", -0.812)].iter().map(|&(k, v)| (k.into(), v)).collect(),
            r_squared: 1.0,
            window: (0.1, 1000.0),
            n_points: 60,
            coordinates: "F vs t".into(),
            residuals: vec![],
        };
        let (tc, _) = logarithmic_window(&r).unwrap();
        assert!((tc - 8.58).abs() < 0.05);
        r.params.insert("a".into(), 0.154);
        r.params.insert("b".into(), 8.661);
        r.params.insert("c".into(), -0.519);
        let (tc, slope) = logarithmic_window(&r).unwrap();
        assert!((tc - 64.2).abs() < 1.0 && slope < 0.0);
        r.params.insert("c".into(), -1e-3);
        assert!(logarithmic_window(&r).unwrap().0 > 1e100);
        r.form = FitForm::Exp;
        assert!(matches!(logarithmic_window(&r), Err(Error::InvalidForm { .. })));
    }
}
