use std::collections::BTreeMap;

use super::{FitForm, FitResult};
use crate::error::{Error, Result};

/// Ordinary least-squares line `v = intercept + slope * u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Points are sorted first so the result does not depend on input order.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> Result<LinearFit> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let n = pts.len() as f64;
    let mu = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let suu: f64 = pts.iter().map(|p| (p.0 - mu).powi(2)).sum();
    if suu <= f64::EPSILON * mu.abs().max(1.0) * n {
        return Err(Error::DegenerateAbscissae(pts[0].0));
    }
    let suv: f64 = pts.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let residuals: Vec<f64> = pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mv).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    Ok(LinearFit { intercept, slope, r_squared, residuals })
}

/// Logs of `(x, y)` pairs, rejecting non-positive values.
pub(crate) fn log_pairs(points: &[(f64, f64)], log_x: bool) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(x, y)| {
            if y <= 0.0 || !y.is_finite() {
                return Err(Error::NonPositive { at: x, value: y });
            }
            if log_x && x <= 0.0 {
                return Err(Error::NonPositive { at: x, value: x });
            }
            Ok((if log_x { x.ln() } else { x }, y.ln()))
        })
        .collect()
}

pub(crate) fn span(points: &[(f64, f64)]) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
}

pub(crate) fn result(
    form: FitForm,
    params: &[(&str, f64)],
    fit: LinearFit,
    window: (f64, f64),
    n_points: usize,
    coordinates: &str,
) -> Result<FitResult> {
    if params.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::FitFailed { starts: 1, best_rss: fit.residuals.iter().map(|r| r * r).sum() });
    }
    Ok(FitResult {
        form,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        r_squared: fit.r_squared,
        window,
        n_points,
        coordinates: coordinates.into(),
        residuals: fit.residuals,
    })
}

/// Generic `y = a x^b` fit on log-log pairs (no minimum beyond two distinct x).
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<FitResult> {
    let fit = least_squares(&log_pairs(points, true)?)?;
    let (a, b) = (fit.intercept.exp(), fit.slope);
    result(FitForm::ScalingPower, &[("a", a), ("b", b)], fit, span(points), points.len(), "ln y vs ln x")
}

/// Sampling-error scaling: `scaling_exp` is `eps = a exp(b x)` (semilog),
/// `scaling_power` is `eps = a x^b` (log-log).
pub fn fit_error_scaling(points: &[(f64, f64)], form: FitForm) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: points.len() });
    }
    match form {
        FitForm::ScalingExp => {
            let fit = least_squares(&log_pairs(points, false)?)?;
            let (a, b) = (fit.intercept.exp(), fit.slope);
            result(form, &[("a", a), ("b", b)], fit, span(points), points.len(), "ln y vs x")
        }
        FitForm::ScalingPower => fit_log_log(points),
        other => Err(Error::InvalidForm { expected: "scaling_exp or scaling_power", found: other.name().into() }),
    }
}
