//! Experiment configuration files (TOML or JSON).
//!
//! ```toml
//! kind = "otoc_decay"
//! seed = 2024
//! realizations = 100            # optional; defaults depend on L
//!
//! [params]
//! sites = [6]
//! alpha = [1.0]
//! disorder = [1.0, 5.0, 10.0]
//! legs = "shared"               # or "independent"
//!
//! [time]                        # optional; per-kind default
//! spacing = "log"
//! start = 0.1
//! end = 1000.0
//! points = 60
//!
//! [estimator]                   # optional; exact by default
//! kind = "fock"
//! states = [1, 2, 4, 8]
//! ```
//!
//! Other optional keys: `output`, `probes`, `middle_fraction`, `eta` and a
//! `[fits]` table (see [`FitConfig`]).

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xxladder::spin::MAX_SITES;
use xxladder::TimeGrid;
use xxladder::DisorderLegs;

/// A schema or validation failure, located by its field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    LevelStats,
    OtocAlphaSweep,
    OtocDecay,
    Lightcone,
    SamplingError,
    ProtocolCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::LevelStats => "level_stats",
            Self::OtocAlphaSweep => "otoc_alpha_sweep",
            Self::OtocDecay => "otoc_decay",
            Self::Lightcone => "lightcone",
            Self::SamplingError => "sampling_error",
            Self::ProtocolCheck => "protocol_check",
        }
    }

    /// Time grid used when the config has no `[time]` table.
    pub fn default_time_grid(self) -> Option<TimeGrid> {
        match self {
            Self::LevelStats => None,
            Self::OtocAlphaSweep | Self::OtocDecay | Self::SamplingError => Some(TimeGrid::DECAY),
            Self::Lightcone => Some(TimeGrid::LIGHTCONE),
            Self::ProtocolCheck => Some(TimeGrid::Linear { start: 0.0, end: 5.0, points: 11 }),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter ranges; the run covers their Cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRanges {
    pub sites: Vec<usize>,
    pub alpha: Vec<f64>,
    pub disorder: Vec<f64>,
    #[serde(default)]
    pub legs: DisorderLegs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    #[default]
    Exact,
    Haar,
    Fock,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default)]
    pub kind: EstimatorKind,
    /// Numbers of initial states `M`; a sampling run sweeps all of them.
    #[serde(default)]
    pub states: Vec<usize>,
}

/// Fit windows; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// End of the exponential window (it starts at decay onset).
    pub exponential_end: f64,
    /// End of the power-law window (it starts where F first drops below 1/2).
    pub power_end: f64,
    /// The logarithmic form is fitted for `h >= mbl_min_disorder`.
    pub mbl_min_disorder: f64,
    /// Largest `M/N` in the power-law sampling-error fit.
    pub power_max_ratio: f64,
    /// `M/N` range of the exponential sampling-error fit.
    pub exp_ratio: [f64; 2],
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { exponential_end: 2.0, power_end: 6.0, mbl_min_disorder: 5.0, power_max_ratio: 0.25, exp_ratio: [0.3, 0.9] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub params: ParamRanges,
    #[serde(default)]
    pub realizations: Option<usize>,
    #[serde(default)]
    pub time: Option<TimeGrid>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    /// Lower-leg probe sites `i` of `sz_i`; defaults to the far end `L`.
    #[serde(default)]
    pub probes: Option<Vec<usize>>,
    #[serde(default)]
    pub middle_fraction: Option<f64>,
    #[serde(default)]
    pub eta: Option<Vec<f64>>,
    #[serde(default)]
    pub fits: FitConfig,
}

/// Realizations per parameter point when the config gives none.
pub fn default_realizations(sites: usize) -> usize {
    match sites {
        0..=5 => 2000,
        6 => 200,
        7 => 20,
        _ => 5,
    }
}

fn sector_dim(sites: usize) -> usize {
    (1..=sites).fold(1, |acc, k| acc * (sites + k) / k)
}

impl ExperimentConfig {
    /// Parses by extension: `.json` as JSON, anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::at("", format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let cfg: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| ConfigError::at(e.path().to_string(), e.inner().message().trim().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: Self =
            serde_path_to_error::deserialize(&mut de).map_err(|e| ConfigError::at(e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn time_grid(&self) -> Option<TimeGrid> {
        self.time.or(self.kind.default_time_grid())
    }

    pub fn times(&self) -> Vec<f64> {
        self.time_grid().map(|g| g.times().expect("validated grid")).unwrap_or_default()
    }

    pub fn realizations_for(&self, sites: usize) -> usize {
        self.realizations.unwrap_or_else(|| default_realizations(sites))
    }

    pub fn probes_for(&self, sites: usize) -> Vec<usize> {
        self.probes.clone().unwrap_or_else(|| vec![sites])
    }

    pub fn eta_levels(&self) -> Vec<f64> {
        self.eta.clone().unwrap_or_else(|| xxladder::wavefront::ETA_LEVELS.to_vec())
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.params;
        for (name, empty) in [("sites", p.sites.is_empty()), ("alpha", p.alpha.is_empty()), ("disorder", p.disorder.is_empty())] {
            if empty {
                return Err(ConfigError::at(format!("params.{name}"), "range is empty"));
            }
        }
        for (i, &l) in p.sites.iter().enumerate() {
            if !(2..=MAX_SITES).contains(&l) {
                return Err(ConfigError::at(format!("params.sites[{i}]"), format!("L = {l} outside 2..={MAX_SITES}")));
            }
        }
        for (name, values) in [("alpha", &p.alpha), ("disorder", &p.disorder)] {
            for (i, v) in values.iter().enumerate() {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(ConfigError::at(format!("params.{name}[{i}]"), format!("{v} is not a finite non-negative number")));
                }
            }
        }
        if self.realizations == Some(0) {
            return Err(ConfigError::at("realizations", "must be at least 1"));
        }
        if let Some(g) = self.time {
            g.times().map_err(|e| ConfigError::at("time", e.to_string()))?;
        }
        self.validate_estimator()?;
        if let Some(probes) = &self.probes {
            if probes.is_empty() {
                return Err(ConfigError::at("probes", "list is empty"));
            }
            for (i, &s) in probes.iter().enumerate() {
                if let Some(&l) = p.sites.iter().find(|&&l| s < 1 || s > l) {
                    return Err(ConfigError::at(format!("probes[{i}]"), format!("site {s} is not on a ladder with L = {l}")));
                }
            }
        }
        if let Some(f) = self.middle_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(ConfigError::at("middle_fraction", format!("{f} not in (0, 1]")));
            }
        }
        if let Some(eta) = &self.eta {
            if eta.is_empty() {
                return Err(ConfigError::at("eta", "list is empty"));
            }
            if let Some(i) = eta.iter().position(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(ConfigError::at(format!("eta[{i}]"), format!("{} not in (0, 1)", eta[i])));
            }
        }
        let [lo, hi] = self.fits.exp_ratio;
        if !(lo < hi) {
            return Err(ConfigError::at("fits.exp_ratio", format!("[{lo}, {hi}] is not an increasing range")));
        }
        Ok(())
    }

    fn validate_estimator(&self) -> Result<(), ConfigError> {
        let e = &self.estimator;
        match (self.kind, e.kind) {
            (ExperimentKind::SamplingError, EstimatorKind::Exact) => {
                return Err(ConfigError::at("estimator.kind", "sampling_error needs `haar` or `fock`"));
            }
            (ExperimentKind::SamplingError, _) if e.states.is_empty() => {
                return Err(ConfigError::at("estimator.states", "range is empty"));
            }
            (ExperimentKind::OtocAlphaSweep | ExperimentKind::OtocDecay, EstimatorKind::Haar | EstimatorKind::Fock)
                if e.states.len() != 1 =>
            {
                return Err(ConfigError::at("estimator.states", "give exactly one state count for an OTOC run"));
            }
            _ => {}
        }
        for (i, &m) in e.states.iter().enumerate() {
            if m == 0 {
                return Err(ConfigError::at(format!("estimator.states[{i}]"), "must be at least 1"));
            }
            if e.kind == EstimatorKind::Fock {
                if let Some(&l) = self.params.sites.iter().find(|&&l| m > sector_dim(l)) {
                    return Err(ConfigError::at(
                        format!("estimator.states[{i}]"),
                        format!("{m} distinct Fock states exceed the sector dimension {} at L = {l}", sector_dim(l)),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON used for the config hash; the output directory is excluded.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        serde_json::to_string(&c).expect("config serializes")
    }
}
