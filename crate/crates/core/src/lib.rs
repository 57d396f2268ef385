//! Two-phase Stokes flow with a sharp, graph-shaped interface and surface
//! tension on an x-periodic strip.
//!
//! The problem is solved in flat-interface coordinates by a Picard iteration
//! on a linear two-phase Stokes solver. Control-to-state sensitivities come
//! from the differentiated fixed point, and a Volume-of-Fluid weak form is
//! checked against the computed states by residual evaluation.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

pub mod error;
pub mod fixed_point;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod rhs;
pub mod scalar;
pub mod state;
pub mod stokes;
pub mod transform;
pub mod vof;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = grid::Grid<f64>;
pub type GridSpec = grid::GridSpec<f64>;
pub type PhysicalParams = grid::PhysicalParams<f64>;
pub type ScalarField2D = grid::ScalarField2D<f64>;
pub type VectorField2D = grid::VectorField2D<f64>;
pub type PhysicalField2D = grid::PhysicalField2D<f64>;
pub type FlatState = state::FlatState<f64>;
pub type RhsTuple = state::RhsTuple<f64>;
