use serde::{Deserialize, Serialize};

use super::basis::SectorBasis;
use crate::error::{Error, Result};

/// Local `sigma^z` on spin `(leg, site)`, stored as its diagonal in the sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaZ {
    pub leg: usize,
    pub site: usize,
    diag: Vec<f64>,
}

impl SigmaZ {
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn label(&self) -> SpinLabel {
        SpinLabel { leg: self.leg, site: self.site }
    }

    /// Basis indices where the spin is up.
    pub fn up_indices(&self) -> Vec<usize> {
        self.diag.iter().enumerate().filter(|(_, &d)| d > 0.0).map(|(i, _)| i).collect()
    }
}

/// `(leg, site)` pair, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinLabel {
    pub leg: usize,
    pub site: usize,
}

/// `+1` where the `(leg, site)` bit is set in a basis state, `-1` otherwise.
pub fn sigma_z_operator(basis: &SectorBasis, leg: usize, site: usize) -> Result<SigmaZ> {
    if !(leg == 1 || leg == 2) || site == 0 || site > basis.sites() {
        return Err(Error::IndexOutOfRange(format!("spin (leg {leg}, site {site}) on an L={} ladder", basis.sites())));
    }
    let bit = basis.bit(leg, site);
    let diag = basis.states().iter().map(|&s| if s >> bit & 1 == 1 { 1.0 } else { -1.0 }).collect();
    Ok(SigmaZ { leg, site, diag })
}
