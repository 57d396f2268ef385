//! Surface-tension functionals on the graph `y = h(x)` and their variations.

use crate::error::Result;

use super::graph::Graph;
use super::kernel::MollifierSpec;
use super::normal::{delta_normal_interface, normal_interface};
use super::testfn::{bilinear, VectorBump, VectorJet};
use super::{panels, quad};

const PANEL: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceForm {
    /// `int sigma kappa (-h', 1) . phi(x, h) dx`.
    Curvature,
    /// `int sigma (h', -1) M(x, h) (h', -1)^T / |(h', -1)| dx` with
    /// `M = D phi - div(phi) I`.
    ByParts,
}

/// `sigma n^T M (-h', 1)` with `n = nu / |nu|`.
pub(crate) fn force_density(nu: [f64; 2], jet: &VectorJet, hp: f64, sigma: f64) -> f64 {
    let len = nu[0].hypot(nu[1]);
    sigma * bilinear([nu[0] / len, nu[1] / len], jet.m(), [-hp, 1.0])
}

/// Directional derivative of the force density along `(dh, dh')` with the
/// normal `nu` and its variation `dnu` supplied.
pub(crate) fn variation_density(nu: [f64; 2], dnu: [f64; 2], jet: &VectorJet, hp: f64, d: f64, dp: f64, sigma: f64) -> f64 {
    let len = nu[0].hypot(nu[1]);
    let dot = dnu[0] * nu[0] + dnu[1] * nu[1];
    let l3 = len * len * len;
    let dn = [dnu[0] / len - dot * nu[0] / l3, dnu[1] / len - dot * nu[1] / l3];
    let n = [nu[0] / len, nu[1] / len];
    let tilde = [-hp, 1.0];
    sigma * (bilinear(dn, jet.m(), tilde) + d * bilinear(n, jet.m_y(), tilde) + bilinear(n, jet.m(), [-dp, 0.0]))
}

pub fn surface_tension_term(h: &dyn Graph, phi: &VectorBump, sigma: f64, form: SurfaceForm) -> f64 {
    let (a, b) = phi.bump.x_range();
    quad(a, b, panels(a, b, PANEL), |x| {
        let [hv, hp, hpp] = h.eval(x);
        let j = phi.jet(x, hv);
        match form {
            SurfaceForm::Curvature => {
                let kappa = hpp / (1.0 + hp * hp).powf(1.5);
                sigma * kappa * (-hp * j.phi[0] + j.phi[1])
            }
            SurfaceForm::ByParts => force_density([-hp, 1.0], &j, hp, sigma),
        }
    })
}

/// The surface term with the mollified normal: `int sigma n_eps^T M (-h', 1) dx`.
pub fn surface_term_eps(h: &dyn Graph, phi: &VectorBump, sigma: f64, spec: &MollifierSpec) -> Result<f64> {
    surface_term_eps_with(h, phi, sigma, spec, PANEL)
}

pub(crate) fn surface_term_eps_with(h: &dyn Graph, phi: &VectorBump, sigma: f64, spec: &MollifierSpec, width: f64) -> Result<f64> {
    let (a, b) = phi.bump.x_range();
    let mut err = None;
    let v = quad(a, b, panels(a, b, width), |x| {
        let [hv, hp, _] = h.eval(x);
        match normal_interface(h, spec, x) {
            Ok(nu) => force_density(nu, &phi.jet(x, hv), hp, sigma),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    err.map_or(Ok(v), Err)
}

/// Variation of the sharp surface term along `dh`, one time slice.
pub fn surface_variation_sharp(h: &dyn Graph, dh: &dyn Graph, phi: &VectorBump, sigma: f64) -> f64 {
    let (a, b) = phi.bump.x_range();
    quad(a, b, panels(a, b, PANEL), |x| {
        let [hv, hp, _] = h.eval(x);
        let [d, dp, _] = dh.eval(x);
        variation_density([-hp, 1.0], [-dp, 0.0], &phi.jet(x, hv), hp, d, dp, sigma)
    })
}

/// Variation with the mollified normal and its mollified variation, one
/// time slice.
pub fn surface_variation_eps(h: &dyn Graph, dh: &dyn Graph, phi: &VectorBump, sigma: f64, spec: &MollifierSpec) -> Result<f64> {
    surface_variation_eps_with(h, dh, phi, sigma, spec, PANEL)
}

pub(crate) fn surface_variation_eps_with(
    h: &dyn Graph,
    dh: &dyn Graph,
    phi: &VectorBump,
    sigma: f64,
    spec: &MollifierSpec,
    width: f64,
) -> Result<f64> {
    let (a, b) = phi.bump.x_range();
    let mut err = None;
    let v = quad(a, b, panels(a, b, width), |x| {
        let [hv, hp, _] = h.eval(x);
        let [d, dp, _] = dh.eval(x);
        match (normal_interface(h, spec, x), delta_normal_interface(h, dh, spec, x)) {
            (Ok(nu), Ok(dnu)) => variation_density(nu, dnu, &phi.jet(x, hv), hp, d, dp, sigma),
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    err.map_or(Ok(v), Err)
}

/// Both sides of `int_{y < h} div(psi) = int psi(x, h) . (-h', 1) dx`:
/// `(volume, graph)`.
pub fn lemma_normal_sides(h: &dyn Graph, psi: &VectorBump) -> (f64, f64) {
    let (a, b) = psi.bump.x_range();
    let (ylo, yhi) = psi.bump.y_range();
    let n = panels(a, b, PANEL);
    let volume = quad(a, b, n, |x| {
        let top = h.eval(x)[0].min(yhi);
        if top <= ylo {
            return 0.0;
        }
        quad(ylo, top, 2, |y| psi.div_jet(x, y).0)
    });
    let graph = quad(a, b, n, |x| {
        let [hv, hp, _] = h.eval(x);
        let p = psi.jet(x, hv).phi;
        -hp * p[0] + p[1]
    });
    (volume, graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::loglog_slope;
    use crate::vof::graph::{cosine, FnGraph};
    use crate::vof::testfn::seeded_suite;

    #[test]
    fn flat_interface_has_no_force() {
        let h = FnGraph(|_| [0.0; 3]);
        for phi in seeded_suite(3, 4, 0.3) {
            assert_eq!(surface_tension_term(&h, &phi, 1.0, SurfaceForm::Curvature), 0.0);
            assert!(surface_tension_term(&h, &phi, 1.0, SurfaceForm::ByParts).abs() < 1e-14);
        }
    }

    #[test]
    fn curvature_and_by_parts_forms_agree() {
        let h = cosine(0.2, 1.0);
        for phi in seeded_suite(5, 10, 0.25) {
            let a = surface_tension_term(&h, &phi, 1.3, SurfaceForm::Curvature);
            let b = surface_tension_term(&h, &phi, 1.3, SurfaceForm::ByParts);
            assert!((a - b).abs() < 1e-8, "{a} {b}");
            let (v, g) = lemma_normal_sides(&h, &phi);
            assert!((v - g).abs() < 1e-8, "{v} {g}");
        }
    }

    #[test]
    fn small_amplitude_matches_linearization() {
        let amp = 1e-3;
        let h = cosine(amp, 1.0);
        let phi = seeded_suite(9, 1, 0.1)[0];
        let (a, b) = phi.bump.x_range();
        let full = surface_tension_term(&h, &phi, 1.0, SurfaceForm::Curvature);
        let lin = quad(a, b, 400, |x| {
            let [hv, _, hpp] = h.eval(x);
            hpp * phi.jet(x, hv).phi[1]
        });
        assert!((full - lin).abs() < 10.0 * amp * amp, "{full} {lin}");
    }

    #[test]
    fn mollified_surface_terms_converge() {
        let h = cosine(0.2, 1.0);
        let dh = FnGraph(|x: f64| [0.1 * (2.0 * x).sin(), 0.2 * (2.0 * x).cos(), -0.4 * (2.0 * x).sin()]);
        let phi = seeded_suite(2, 1, 0.2)[0];
        let sharp = surface_tension_term(&h, &phi, 1.0, SurfaceForm::ByParts);
        let dsharp = surface_variation_sharp(&h, &dh, &phi, 1.0);
        let eps = [0.2, 0.1, 0.05];
        let mut e0 = Vec::new();
        let mut e1 = Vec::new();
        for &e in &eps {
            let spec = MollifierSpec::new(0.2, e).unwrap();
            e0.push((surface_term_eps(&h, &phi, 1.0, &spec).unwrap() - sharp).abs());
            e1.push((surface_variation_eps(&h, &dh, &phi, 1.0, &spec).unwrap() - dsharp).abs());
        }
        assert!(loglog_slope(&eps, &e0).unwrap() >= 1.0, "{e0:?}");
        assert!(loglog_slope(&eps, &e1).unwrap() >= 1.0, "{e1:?}");
    }

    #[test]
    fn sharp_variation_is_derivative_of_surface_term() {
        let phi = seeded_suite(8, 1, 0.2)[0];
        let base = cosine(0.2, 1.0);
        let dh = cosine(0.1, 2.0);
        let d = surface_variation_sharp(&base, &dh, &phi, 1.0);
        let s = 1e-6;
        let pert = |s: f64| {
            FnGraph(move |t: f64| {
                let [a, b, c] = base.eval(t);
                let [p, q, r] = dh.eval(t);
                [a + s * p, b + s * q, c + s * r]
            })
        };
        let fd = (surface_tension_term(&pert(s), &phi, 1.0, SurfaceForm::ByParts)
            - surface_tension_term(&pert(-s), &phi, 1.0, SurfaceForm::ByParts))
            / (2.0 * s);
        assert!((fd - d).abs() < 1e-7, "{fd} {d}");
    }
}
