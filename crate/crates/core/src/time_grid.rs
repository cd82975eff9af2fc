//! Time grids in units of `1/J_par`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative grid description, as it appears in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "snake_case")]
pub enum TimeGrid {
    Linear { start: f64, end: f64, points: usize },
    Log { start: f64, end: f64, points: usize },
}

impl TimeGrid {
    /// 60 log-spaced points on `[0.1, 1000]`, used for decay studies.
    pub const DECAY: TimeGrid = TimeGrid::Log { start: 0.1, end: 1000.0, points: 60 };
    /// 200 points on `[0, 10]`, used for lightcone grids.
    pub const LIGHTCONE: TimeGrid = TimeGrid::Linear { start: 0.0, end: 10.0, points: 200 };

    pub fn times(&self) -> Result<Vec<f64>> {
        match *self {
            TimeGrid::Linear { start, end, points } => linear_times(start, end, points),
            TimeGrid::Log { start, end, points } => log_times(start, end, points),
        }
    }
}

/// `points` evenly spaced values from `start` to `end` inclusive.
pub fn linear_times(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(end > start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "time_grid",
            reason: format!("linear grid [{start}, {end}] with {points} points"),
        });
    }
    let step = (end - start) / (points - 1) as f64;
    Ok((0..points).map(|k| if k + 1 == points { end } else { start + step * k as f64 }).collect())
}

/// `points` geometrically spaced values from `start` to `end` inclusive.
pub fn log_times(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if start <= 0.0 {
        return Err(Error::InvalidParameter { name: "time_grid", reason: format!("log grid must start above 0, got {start}") });
    }
    Ok(linear_times(start.log10(), end.log10(), points)?.into_iter().map(|e| 10f64.powf(e)).collect())
}
