//! Linear two-phase Stokes problem with a free interface, plus the
//! compatibility-resolving reference solution built from heat-smoothed data.

mod band;
mod solver;
mod zstar;

pub use band::{BandLu, BandMatrix};
pub use solver::{InterfaceResiduals, ModeLayout, StokesSolver};
pub use zstar::{construct_zstar, heat_smooth};
#[allow(unused_imports)]
pub(crate) use solver::{one_sided, spectra_line, spectra_side, synth_line, synth_side};
