use crate::error::{Error, Result};

/// Largest ladder the dense pipeline supports.
pub const MAX_SITES: usize = 8;

/// Half-filling (Sz = 0) configurations of a 2 x L ladder.
///
/// Spin `(leg, site)` (both 1-based) is stored at bit `(leg - 1) * L + (site - 1)`;
/// a set bit is an up spin. States are listed in ascending bitmask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    states: Vec<u32>,
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn num_spins(&self) -> usize {
        2 * self.sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u32 {
        self.states[index]
    }

    /// Basis index of `state`, or `None` if it is not in the sector.
    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Bit position of spin `(leg, site)`.
    pub fn bit(&self, leg: usize, site: usize) -> u32 {
        ((leg - 1) * self.sites + (site - 1)) as u32
    }
}

/// Enumerates the `C(2L, L)` half-filling states for `2 <= L <= 8`.
pub fn build_sector_basis(sites: usize) -> Result<SectorBasis> {
    if !(2..=MAX_SITES).contains(&sites) {
        return Err(Error::Size(sites));
    }
    let n = 2 * sites as u32;
    let mut states = Vec::new();
    // Gosper's hack walks the fixed-popcount words in ascending order.
    let mut v: u32 = (1 << sites) - 1;
    while v < (1 << n) {
        states.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(SectorBasis { sites, states })
}
