//! Mollified interface normals `nu_eps = -phi_eps * grad(alpha)` and their
//! variations along an interface displacement `dh`.

use crate::error::{Error, Result};

use super::graph::Graph;
use super::kernel::{psi_mass, MollifierSpec};
use super::{panels, quad2};

const SLOPE_SAMPLES: usize = 64;

/// Fails with [`Error::SlopeBound`] unless `|h'| <= 1 - delta` on
/// `[x - eps, x + eps]`.
pub fn check_slope(g: &dyn Graph, spec: &MollifierSpec, x: f64) -> Result<()> {
    let bound = 1.0 - spec.delta;
    let mut max_slope: f64 = 0.0;
    for k in 0..=SLOPE_SAMPLES {
        let xs = x - spec.eps + 2.0 * spec.eps * k as f64 / SLOPE_SAMPLES as f64;
        max_slope = max_slope.max(g.eval(xs)[1].abs());
    }
    if max_slope > bound {
        return Err(Error::SlopeBound { max_slope, bound });
    }
    Ok(())
}

/// Graph route: `int phi_eps((s, h(s)) - (x, y)) (-h'(s), 1) ds`.
pub fn normal_graph(g: &dyn Graph, spec: &MollifierSpec, x: f64, y: f64) -> Result<[f64; 2]> {
    check_slope(g, spec, x)?;
    let (a, b) = (x - spec.eps, x + spec.eps);
    Ok(quad2(a, b, 32, |s| {
        let [h, hp, _] = g.eval(s);
        let w = spec.phi(s - x, h - y);
        [-hp * w, w]
    }))
}

/// Volume route: `int_{y' < h(x')} grad phi_eps((x', y') - (x, y))` by
/// two-dimensional Gauss quadrature, split at the kernel's breakpoints in y.
pub fn normal_volume(g: &dyn Graph, spec: &MollifierSpec, x: f64, y: f64) -> Result<[f64; 2]> {
    check_slope(g, spec, x)?;
    let e = spec.eps;
    let inner = 1.0 - spec.delta;
    let breaks = [y - e, y - inner * e, y + inner * e, y + e];
    let (a, b) = (x - e, x + e);
    Ok(quad2(a, b, 64, |s| {
        let top = g.eval(s)[0];
        let mut acc = [0.0; 2];
        for w in breaks.windows(2) {
            let hi = w[1].min(top);
            if hi <= w[0] {
                break;
            }
            let v = quad2(w[0], hi, 1, |t| {
                let (gx, gy) = spec.grad_phi(s - x, t - y);
                [gx, gy]
            });
            acc[0] += v[0];
            acc[1] += v[1];
        }
        acc
    }))
}

/// Reduced interface form `eps^-1 int psi_mass((s - x)/eps) (-h'(s), 1) ds`,
/// equal to `nu_eps(x, h(x))` under the slope bound.
pub fn normal_interface(g: &dyn Graph, spec: &MollifierSpec, x: f64) -> Result<[f64; 2]> {
    check_slope(g, spec, x)?;
    Ok(reduced(spec, x, |s| [-g.eval(s)[1], 1.0]))
}

/// Graph route for the variation: `int grad phi_eps((s, h(s)) - (x, y)) dh(s) ds`.
pub fn delta_normal_graph(g: &dyn Graph, dg: &dyn Graph, spec: &MollifierSpec, x: f64, y: f64) -> Result<[f64; 2]> {
    check_slope(g, spec, x)?;
    let (a, b) = (x - spec.eps, x + spec.eps);
    Ok(quad2(a, b, 32, |s| {
        let h = g.eval(s)[0];
        let d = dg.eval(s)[0];
        let (gx, gy) = spec.grad_phi(s - x, h - y);
        [gx * d, gy * d]
    }))
}

/// Reduced interface form of the variation, `eps^-1 int psi_mass (-dh', 0)`.
pub fn delta_normal_interface(g: &dyn Graph, dg: &dyn Graph, spec: &MollifierSpec, x: f64) -> Result<[f64; 2]> {
    check_slope(g, spec, x)?;
    Ok(reduced(spec, x, |s| [-dg.eval(s)[1], 0.0]))
}

fn reduced(spec: &MollifierSpec, x: f64, f: impl Fn(f64) -> [f64; 2]) -> [f64; 2] {
    let (a, b) = (x - spec.eps, x + spec.eps);
    let v = quad2(a, b, panels(a, b, spec.eps / 2.0), |s| {
        let w = psi_mass((s - x) / spec.eps);
        let [p, q] = f(s);
        [w * p, w * q]
    });
    [v[0] / spec.eps, v[1] / spec.eps]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::loglog_slope;
    use crate::vof::graph::{cosine, FnGraph};

    #[test]
    fn flat_interface_gives_unit_vertical() {
        let g = FnGraph(|_| [0.0; 3]);
        let spec = MollifierSpec::new(0.2, 0.1).unwrap();
        for x in [0.0, 1.0, 3.0] {
            let n = normal_graph(&g, &spec, x, 0.0).unwrap();
            assert!(n[0].abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-13, "{n:?}");
            let r = normal_interface(&g, &spec, x).unwrap();
            assert!((r[1] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn volume_and_graph_routes_agree() {
        let g = cosine(0.1, 1.0);
        let spec = MollifierSpec::new(0.2, 0.1).unwrap();
        for (x, dy) in [(0.3, 0.0), (1.2, 0.04), (2.5, -0.07), (4.0, 0.095)] {
            let y = g.eval(x)[0] + dy;
            let a = normal_graph(&g, &spec, x, y).unwrap();
            let b = normal_volume(&g, &spec, x, y).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6, "{a:?} {b:?}");
        }
        let y = g.eval(0.7)[0];
        let a = normal_graph(&g, &spec, 0.7, y).unwrap();
        let r = normal_interface(&g, &spec, 0.7).unwrap();
        assert!((a[0] - r[0]).abs() < 1e-12 && (a[1] - r[1]).abs() < 1e-12);
    }

    #[test]
    fn interface_errors_are_second_order_in_eps() {
        let g = cosine(0.1, 1.0);
        let dg = FnGraph(|x: f64| [0.3 * (2.0 * x).sin(), 0.6 * (2.0 * x).cos(), -1.2 * (2.0 * x).sin()]);
        let eps = [0.2, 0.1, 0.05, 0.025];
        let xs: Vec<f64> = (0..16).map(|i| i as f64 * 0.39).collect();
        let mut en = Vec::new();
        let mut ed = Vec::new();
        for &e in &eps {
            let spec = MollifierSpec::new(0.2, e).unwrap();
            let (mut a, mut b) = (0.0f64, 0.0f64);
            for &x in &xs {
                let n = normal_interface(&g, &spec, x).unwrap();
                let hp = g.eval(x)[1];
                a = a.max((n[0] + hp).abs().max((n[1] - 1.0).abs()));
                let d = delta_normal_interface(&g, &dg, &spec, x).unwrap();
                let dhp = dg.eval(x)[1];
                b = b.max((d[0] + dhp).abs().max(d[1].abs()));
                let gr = delta_normal_graph(&g, &dg, &spec, x, g.eval(x)[0]).unwrap();
                assert!((gr[0] - d[0]).abs() < 1e-10 && (gr[1] - d[1]).abs() < 1e-10, "{gr:?} {d:?}");
            }
            en.push(a);
            ed.push(b);
        }
        assert!(loglog_slope(&eps, &en).unwrap() >= 1.9, "{en:?}");
        assert!(loglog_slope(&eps, &ed).unwrap() >= 1.9, "{ed:?}");
    }

    #[test]
    fn variation_is_derivative_of_normal() {
        let spec = MollifierSpec::new(0.2, 0.1).unwrap();
        let base = cosine(0.1, 1.0);
        // inside the kernel's transition band, where the map is nonlinear
        let (x, y) = (1.0, base.eval(1.0)[0] - 0.09);
        let dg = cosine(0.2, 2.0);
        let d = delta_normal_graph(&base, &dg, &spec, x, y).unwrap();
        let mut errs = Vec::new();
        let ss = [1e-2, 5e-3, 2.5e-3];
        for s in ss {
            let pert = FnGraph(move |t: f64| {
                let [a, b, c] = base.eval(t);
                let [p, q, r] = dg.eval(t);
                [a + s * p, b + s * q, c + s * r]
            });
            let n1 = normal_graph(&pert, &spec, x, y).unwrap();
            let n0 = normal_graph(&base, &spec, x, y).unwrap();
            errs.push(((n1[0] - n0[0]) / s - d[0]).abs().max(((n1[1] - n0[1]) / s - d[1]).abs()));
        }
        let slope = loglog_slope(&ss, &errs).unwrap();
        assert!(slope > 0.9 && slope < 1.2, "{errs:?}");
    }

    #[test]
    fn steep_interface_is_rejected() {
        let g = cosine(2.0, 1.0);
        let spec = MollifierSpec::new(0.2, 0.1).unwrap();
        assert!(matches!(normal_interface(&g, &spec, 1.5), Err(Error::SlopeBound { .. })));
        assert!(check_slope(&g, &spec, 0.0).is_ok());
    }
}
