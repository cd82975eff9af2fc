//! Decay-law and scaling fits.
//!
//! Log-space forms are fitted by ordinary least squares in their transformed
//! coordinates; R² is reported in those same coordinates. The stretched form
//! `1 - a exp(-b t^c)` is fitted directly with a damped Gauss-Newton iteration.

mod decay;
mod linear;
mod signal;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use decay::{fit_exponential, fit_mbl_form, fit_power_law, logarithmic_window, MblFitOptions};
pub use linear::{fit_error_scaling, fit_log_log, LinearFit};
pub use signal::{error_signal, ErrorKind, ErrorSignal};

use crate::error::{Error, Result};

/// Fraction of the grid, counted from the end, used for saturation means.
pub const SATURATION_FRACTION: f64 = 0.25;
/// `F` below this marks the onset of decay.
pub const DECAY_ONSET: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// `F = a exp(-lambda t)`
    Exp,
    /// `F = a t^-b`
    Power,
    /// `F = 1 - a exp(-b t^c)`, `c < 0`
    Mbl,
    /// `y = a exp(b x)`
    ScalingExp,
    /// `y = a x^b`
    ScalingPower,
}

impl FitForm {
    pub fn name(self) -> &'static str {
        match self {
            FitForm::Exp => "exp",
            FitForm::Power => "power",
            FitForm::Mbl => "mbl",
            FitForm::ScalingExp => "scaling_exp",
            FitForm::ScalingPower => "scaling_power",
        }
    }
}

/// Outcome of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub form: FitForm,
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    /// Abscissa range of the points actually used.
    pub window: (f64, f64),
    pub n_points: usize,
    /// Coordinates in which residuals and R² are computed, e.g. `"ln y vs t"`.
    pub coordinates: String,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(f64::NAN)
    }

    /// Evaluates the fitted curve.
    pub fn predict(&self, x: f64) -> f64 {
        let (a, b) = (self.param("a"), self.param("b"));
        match self.form {
            FitForm::Exp => a * (-self.param("lambda") * x).exp(),
            FitForm::Power => a * x.powf(-b),
            FitForm::Mbl => 1.0 - a * (-b * x.powf(self.param("c"))).exp(),
            FitForm::ScalingExp => a * (b * x).exp(),
            FitForm::ScalingPower => a * x.powf(b),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fit results serialize")
    }

    fn expect_form(&self, form: FitForm) -> Result<()> {
        if self.form == form {
            Ok(())
        } else {
            Err(Error::InvalidForm { expected: form.name(), found: self.form.name().into() })
        }
    }
}

/// Closed abscissa interval used to select fit points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: f64,
    pub max: f64,
}

impl Window {
    pub const ALL: Window = Window { min: f64::NEG_INFINITY, max: f64::INFINITY };

    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// First abscissa at which `y` drops strictly below `level`.
pub fn first_below(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    x.iter().zip(y).find(|(_, &v)| v < level).map(|(&t, _)| t)
}

/// Default exponential-decay window: from the decay onset to `t_end`.
pub fn onset_window(t: &[f64], f: &[f64], t_end: f64) -> Option<Window> {
    first_below(t, f, DECAY_ONSET).map(|start| Window::new(start, t_end))
}

/// Default power-law window: from the first time `F < 0.5` to `t_end`.
pub fn half_decay_window(t: &[f64], f: &[f64], t_end: f64) -> Option<Window> {
    first_below(t, f, 0.5).map(|start| Window::new(start, t_end))
}

/// Index where the saturation window (last quarter of the grid) starts.
pub fn saturation_start(len: usize) -> usize {
    ((len as f64) * (1.0 - SATURATION_FRACTION)).floor() as usize
}

/// Mean of the last quarter of `y`.
pub fn saturation_mean(y: &[f64]) -> f64 {
    let tail = &y[saturation_start(y.len()).min(y.len().saturating_sub(1))..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = fit_error_scaling(&[(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)], FitForm::ScalingPower).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["form", "params", "r_squared", "window", "n_points", "coordinates"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("residuals").is_none());
        assert_eq!(v["form"], "scaling_power");
        assert_eq!(v["window"][1], 4.0);
    }

    #[test]
    fn windows() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let f = [1.0, 0.9995, 0.7, 0.4];
        assert_eq!(onset_window(&t, &f, 5.0), Some(Window::new(2.0, 5.0)));
        assert_eq!(half_decay_window(&t, &f, 5.0), Some(Window::new(3.0, 5.0)));
        assert_eq!(saturation_start(60), 45);
        assert_eq!(saturation_mean(&[0.0, 0.0, 0.0, 4.0]), 4.0);
    }
}
