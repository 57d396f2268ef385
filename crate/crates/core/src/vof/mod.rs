//! Volume-of-Fluid view of the computed flow: phase-indicator transport,
//! mollified normals, interface measures and weak-form residuals.
//!
//! Everything here works on `f64` and on continuous interpolants of the
//! discrete states.

mod graph;
mod indicator;
mod kernel;
mod measure;
mod normal;
mod residual;
mod surface;
mod testfn;

pub use graph::{cosine, spectral_graph, wrap, FnGraph, Graph};
pub use indicator::{symmetric_difference, AnalyticFlow, CharacteristicFlow, PhaseField, TrajectorySampler, VelocitySampler};
pub use kernel::{psi_mass, psi_mass_deriv, psi_plat, psi_plat_deriv, MollifierSpec};
pub use measure::{GradientForm, InterfaceMeasure};
pub use normal::{
    check_slope, delta_normal_graph, delta_normal_interface, normal_graph, normal_interface, normal_volume,
};
pub use residual::{vof_forward_residual, vof_sensitivity_residual, ResidualOptions, ResidualReport, SensitivityInputs, TimePairing};
pub use surface::{lemma_normal_sides, surface_tension_term, surface_term_eps, surface_variation_eps, surface_variation_sharp, SurfaceForm};
pub use testfn::{bilinear, bump1, seeded_suite, Bump, Jet, TimeBump, VectorBump, VectorJet};

use std::sync::LazyLock;

use crate::grid::GaussLegendre;

static GL8: LazyLock<GaussLegendre<f64>> = LazyLock::new(|| GaussLegendre::new(8));

/// Composite 8-point Gauss rule on `[a, b]`.
pub(crate) fn quad(a: f64, b: f64, panels: usize, f: impl FnMut(f64) -> f64) -> f64 {
    GL8.composite(a, b, panels, f)
}

/// As [`quad`] for pairs.
pub(crate) fn quad2(a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> [f64; 2]) -> [f64; 2] {
    let mut s = [0.0; 2];
    for (x, w) in GL8.composite_points(a, b, panels) {
        let v = f(x);
        s[0] += w * v[0];
        s[1] += w * v[1];
    }
    s
}

/// Panel count giving panels no wider than `width`.
pub(crate) fn panels(a: f64, b: f64, width: f64) -> usize {
    (((b - a) / width).ceil() as usize).max(1)
}
