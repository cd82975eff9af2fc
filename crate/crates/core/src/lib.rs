//! Exact-diagonalization toolkit for scrambling in the disordered ladder-XX model.
//!
//! The ladder has two legs of `L` spins with XX couplings along the legs
//! (`J_par`), XX rungs (`alpha * J_par`), open boundaries and a random
//! longitudinal field. Everything lives in the half-filling sector, which is
//! diagonalized densely; the OTOC, level-statistics, fitting, wavefront and
//! protocol modules all work from the resulting [`EigenSystem`].

pub mod error;
pub mod fits;
pub mod level_stats;
pub mod linalg;
pub mod otoc;
pub mod protocol;
pub mod rng;
pub mod spin;
pub mod time_grid;
pub mod wavefront;

pub use error::{Error, Result};
pub use fits::{FitForm, FitResult, Window};
pub use level_stats::GapRatioReport;
pub use linalg::{Complex64, SplitMatrix};
pub use otoc::{InitialState, OtocSeries};
pub use spin::{DisorderLegs, DisorderRealization, EigenSystem, LadderParams, SectorBasis, SectorHamiltonian};
pub use time_grid::TimeGrid;
pub use wavefront::{Contour, WavefrontGrid};
