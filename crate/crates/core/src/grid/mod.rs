//! Discretization substrate: an x-periodic strip `[0, Lx) x [-Ly, Ly]` whose
//! interface row `y = 0` is stored twice, once per side, so one-sided traces
//! and jumps are always available.

mod field;
mod interp;
mod ops;
mod quadrature;
mod spectral;
mod spec;

pub use field::{PhysicalField2D, ScalarField2D, Side, VectorField2D};
pub use interp::{cubic_weights, periodic_cubic, ColumnInterp, ColumnSample};
pub use ops::{ddy, ddy2, integrate_full, integrate_half, integrate_interface, integrate_line, trace_jump, Sidedness, TraceJump};
pub use quadrature::GaussLegendre;
pub use spectral::FourierSeries;
pub use spec::{Grid, GridSpec, PhysicalParams};

/// One-dimensional periodic field on the x nodes (interface quantities).
pub type InterfaceField1D<T> = ndarray::Array1<T>;
