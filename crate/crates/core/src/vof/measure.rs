//! The sensitivity `d alpha` of the phase indicator: a measure on the graph
//! `y = h(x)` with density `dh`.

use super::graph::Graph;
use super::testfn::VectorBump;
use super::{panels, quad};

const PANEL: f64 = 0.005;

/// Which side of the integration-by-parts identity to evaluate for
/// `-int psi . grad d(d alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientForm {
    /// `int div(psi)(x, h) dh dx`.
    Divergence,
    /// `int d_y psi(x, h) . (-h', 1) dh + psi(x, h) . (-dh', 0) dx`.
    Parts,
}

pub struct InterfaceMeasure<'a> {
    pub h: &'a dyn Graph,
    pub dh: &'a dyn Graph,
}

impl<'a> InterfaceMeasure<'a> {
    pub fn new(h: &'a dyn Graph, dh: &'a dyn Graph) -> Self {
        Self { h, dh }
    }

    /// `int_a^b dh dx`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        quad(a, b, panels(a, b, PANEL), |x| self.dh.eval(x)[0])
    }

    /// `int_a^b phi(x, h(x)) dh(x) dx` for `phi` supported over `[a, b]`.
    pub fn pair_value(&self, phi: impl Fn(f64, f64) -> f64, a: f64, b: f64) -> f64 {
        quad(a, b, panels(a, b, PANEL), |x| phi(x, self.h.eval(x)[0]) * self.dh.eval(x)[0])
    }

    pub fn pair_gradient(&self, psi: &VectorBump, form: GradientForm) -> f64 {
        let (a, b) = psi.bump.x_range();
        quad(a, b, panels(a, b, PANEL), |x| {
            let [h, hp, _] = self.h.eval(x);
            let [d, dp, _] = self.dh.eval(x);
            match form {
                GradientForm::Divergence => psi.div_jet(x, h).0 * d,
                GradientForm::Parts => {
                    let j = psi.jet(x, h);
                    let py = [j.d[0][1], j.d[1][1]];
                    (py[0] * -hp + py[1]) * d - j.phi[0] * dp
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vof::graph::{cosine, FnGraph};
    use crate::vof::testfn::seeded_suite;
    use std::f64::consts::PI;

    #[test]
    fn value_mode_examples() {
        let h = cosine(0.2, 1.0);
        let zero = FnGraph(|_| [0.0; 3]);
        let m = InterfaceMeasure::new(&h, &zero);
        assert_eq!(m.pair_value(|_, _| 1.0, -PI, PI), 0.0);
        let dh = FnGraph(|x: f64| [1.0 + 0.5 * x.sin(), 0.5 * x.cos(), -0.5 * x.sin()]);
        let m = InterfaceMeasure::new(&h, &dh);
        let v = m.pair_value(|_, y| if y.abs() < 1.0 { 1.0 } else { 0.0 }, -PI, PI);
        assert!((v - 2.0 * PI).abs() < 1e-12 && (m.mass(-PI, PI) - v).abs() < 1e-12);
    }

    #[test]
    fn gradient_forms_agree() {
        let h = cosine(0.2, 1.0);
        let dh = FnGraph(|x: f64| [0.3 * (2.0 * x).cos() + 0.1, -0.6 * (2.0 * x).sin(), -1.2 * (2.0 * x).cos()]);
        let m = InterfaceMeasure::new(&h, &dh);
        for psi in seeded_suite(11, 8, 0.2) {
            let a = m.pair_gradient(&psi, GradientForm::Divergence);
            let b = m.pair_gradient(&psi, GradientForm::Parts);
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }
}
