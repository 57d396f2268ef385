//! Manufactured solutions for the linear Stokes solver.

use ndarray::Array1;

use crate::grid::{Grid, GridSpec, PhysicalParams, ScalarField2D, Side, VectorField2D};
use crate::state::{FlatState, RhsTuple};
use crate::stokes::StokesSolver;
use crate::Result;

use super::stats::pairwise_rates;

/// Profile `f(y)` per side with its first two derivatives.
type Profile = fn(f64, f64, Side) -> (f64, f64, f64);

/// `v = cos x A(y) a(t)`, `w = sin x B(y) a(t)`, `pi = cos x P(y) a(t)`,
/// `h = H cos x b(t)`.
struct Manufactured {
    a: Profile,
    b: Profile,
    p: Profile,
    amp_h: f64,
    theta: fn(f64) -> (f64, f64),
    phi: fn(f64) -> (f64, f64),
}

fn smooth_a(y: f64, ly: f64, side: Side) -> (f64, f64, f64) {
    let q = (ly * ly - y * y, -2.0 * y, -2.0);
    let e = match side {
        Side::Lower => ((0.3 * y).exp(), 0.3 * (0.3 * y).exp(), 0.09 * (0.3 * y).exp()),
        Side::Upper => ((0.4 * y).cos(), -0.4 * (0.4 * y).sin(), -0.16 * (0.4 * y).cos()),
    };
    (q.0 * e.0, q.1 * e.0 + q.0 * e.1, q.2 * e.0 + 2.0 * q.1 * e.1 + q.0 * e.2)
}

fn smooth_b(y: f64, ly: f64, side: Side) -> (f64, f64, f64) {
    let q = (ly * ly - y * y, -2.0 * y, -2.0);
    let e = match side {
        Side::Lower => (1.0 + 0.2 * y + 0.1 * y * y, 0.2 + 0.2 * y, 0.2),
        Side::Upper => ((-0.2 * y).exp(), -0.2 * (-0.2 * y).exp(), 0.04 * (-0.2 * y).exp()),
    };
    (q.0 * e.0, q.1 * e.0 + q.0 * e.1, q.2 * e.0 + 2.0 * q.1 * e.1 + q.0 * e.2)
}

fn smooth_p(y: f64, _ly: f64, side: Side) -> (f64, f64, f64) {
    match side {
        Side::Lower => (0.5 * (0.5 * y).exp(), 0.25 * (0.5 * y).exp(), 0.125 * (0.5 * y).exp()),
        Side::Upper => (y.cos() + 0.3 * y, -y.sin() + 0.3, -y.cos()),
    }
}

fn tent(y: f64, ly: f64, side: Side) -> (f64, f64, f64) {
    match side {
        Side::Lower => (1.0 + y / ly, 1.0 / ly, 0.0),
        Side::Upper => (1.0 - y / ly, -1.0 / ly, 0.0),
    }
}

fn linear_p(y: f64, _ly: f64, side: Side) -> (f64, f64, f64) {
    match side {
        Side::Lower => (0.5 + 0.2 * y, 0.2, 0.0),
        Side::Upper => (1.0 - 0.1 * y, -0.1, 0.0),
    }
}

impl Manufactured {
    fn steady() -> Self {
        Self { a: smooth_a, b: smooth_b, p: smooth_p, amp_h: 0.3, theta: |_| (1.0, 0.0), phi: |_| (1.0, 0.0) }
    }

    /// Piecewise linear in y, so the y-discretization is exact and only the
    /// time error remains.
    fn transient() -> Self {
        Self {
            a: tent,
            b: tent,
            p: linear_p,
            amp_h: 0.3,
            theta: |t| (1.0 + (2.0 * t).sin(), 2.0 * (2.0 * t).cos()),
            phi: |t| (t.cos(), -t.sin()),
        }
    }

    fn state(&self, grid: &Grid<f64>, t: f64) -> FlatState<f64> {
        let ly = grid.spec.ly;
        let th = (self.theta)(t).0;
        let u = VectorField2D {
            x: ScalarField2D::from_fn(grid, |x, y, s| x.cos() * (self.a)(y, ly, s).0 * th),
            y: ScalarField2D::from_fn(grid, |x, y, s| x.sin() * (self.b)(y, ly, s).0 * th),
        };
        let pi = ScalarField2D::from_fn(grid, |x, y, s| x.cos() * (self.p)(y, ly, s).0 * th);
        let jump = ((self.p)(0.0, ly, Side::Upper).0 - (self.p)(0.0, ly, Side::Lower).0) * th;
        let r = Array1::from_shape_fn(grid.nx(), |i| grid.x(i).cos() * jump);
        let h = Array1::from_shape_fn(grid.nx(), |i| self.amp_h * grid.x(i).cos() * (self.phi)(t).0);
        FlatState { u, pi, r, h }
    }

    fn rhs(&self, grid: &Grid<f64>, params: &PhysicalParams<f64>, t: f64) -> RhsTuple<f64> {
        let ly = grid.spec.ly;
        let (th, dth) = (self.theta)(t);
        let (ph, dph) = (self.phi)(t);
        let (a, b, p) = (self.a, self.b, self.p);
        let fv = ScalarField2D::from_fn(grid, |x, y, s| {
            let (av, _, a2) = a(y, ly, s);
            x.cos() * (params.rho(s) * av * dth - params.mu(s) * (a2 - av) * th) - x.sin() * p(y, ly, s).0 * th
        });
        let fw = ScalarField2D::from_fn(grid, |x, y, s| {
            let (bv, _, b2) = b(y, ly, s);
            x.sin() * (params.rho(s) * bv * dth - params.mu(s) * (b2 - bv) * th) + x.cos() * p(y, ly, s).1 * th
        });
        let fd = ScalarField2D::from_fn(grid, |x, y, s| x.sin() * (b(y, ly, s).1 - a(y, ly, s).0) * th);
        let (mu1, mu2) = (params.mu1, params.mu2);
        let (au, al) = (a(0.0, ly, Side::Upper), a(0.0, ly, Side::Lower));
        let (bu, bl) = (b(0.0, ly, Side::Upper), b(0.0, ly, Side::Lower));
        let jp = p(0.0, ly, Side::Upper).0 - p(0.0, ly, Side::Lower).0;
        let line = |f: &dyn Fn(f64) -> f64| Array1::from_shape_fn(grid.nx(), |i| f(grid.x(i)));
        RhsTuple {
            f: VectorField2D { x: fv, y: fw },
            fd,
            gv: line(&|x| -((mu2 * au.1 - mu1 * al.1) + (mu2 - mu1) * bu.0) * x.cos() * th),
            gw: line(&|x| {
                (-2.0 * (mu2 * bu.1 - mu1 * bl.1) * x.sin() + jp * x.cos()) * th + params.sigma * self.amp_h * x.cos() * ph
            }),
            gh: line(&|x| self.amp_h * x.cos() * dph - bu.0 * x.sin() * th),
        }
    }

    /// Relative max-norm error of `(u, pi, h)` at the final level, and the
    /// interface-row residual over the run.
    fn run(&self, spec: GridSpec<f64>, params: &PhysicalParams<f64>) -> Result<(f64, f64)> {
        let grid = Grid::new(spec)?;
        let solver = StokesSolver::new(&grid, params)?;
        let steps = grid.spec.n_steps();
        let rhs: Vec<_> = (0..=steps).map(|m| self.rhs(&grid, params, grid.spec.dt * m as f64)).collect();
        let z0 = self.state(&grid, 0.0);
        let z = solver.solve(&rhs, &z0.u, &z0.h)?;
        let exact = self.state(&grid, grid.spec.dt * steps as f64);
        let got = &z[steps];
        let rel = |e: f64, s: f64| e / s.max(f64::MIN_POSITIVE);
        let lmax = |a: &Array1<f64>| a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eu = rel(got.u.axpy(-1.0, &exact.u).max_abs(), exact.u.max_abs());
        let ep = rel(got.pi.axpy(-1.0, &exact.pi).max_abs(), exact.pi.max_abs());
        let eh = rel(lmax(&(&got.h - &exact.h)), lmax(&exact.h));
        Ok((eu.max(ep).max(eh), solver.interface_residuals(&z, &rhs).max()))
    }
}

/// One refinement level of the MMS study.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MmsLevel {
    pub kind: &'static str,
    pub ny: usize,
    pub dt: f64,
    pub error: f64,
    pub interface_residual: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MmsReport {
    pub levels: Vec<MmsLevel>,
    pub spatial_rates: Vec<f64>,
    pub temporal_rates: Vec<f64>,
    pub max_interface_residual: f64,
}

impl MmsReport {
    pub fn spatial_rate(&self) -> f64 {
        self.spatial_rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn temporal_rate(&self) -> f64 {
        self.temporal_rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Spatial study: steady solution, `ny` doubled `halvings` times from `ny0`.
/// Temporal study: y-exact solution, `dt` halved from `dt0`. Rates are the
/// worst pairwise observed orders.
pub fn mms_study(
    params: &PhysicalParams<f64>,
    nx: usize,
    ly: f64,
    t0: f64,
    ny0: usize,
    dt0: f64,
    halvings: usize,
) -> Result<MmsReport> {
    let mut levels = Vec::new();
    let steady = Manufactured::steady();
    let transient = Manufactured::transient();
    let mut es = Vec::new();
    for l in 0..=halvings {
        let ny = (ny0 - 1) * (1 << l) + 1;
        let spec = GridSpec::new(nx, ny, ly, t0 / 5.0, t0);
        let (error, res) = steady.run(spec, params)?;
        es.push(error);
        levels.push(MmsLevel { kind: "spatial", ny, dt: t0 / 5.0, error, interface_residual: res });
    }
    let mut et = Vec::new();
    for l in 0..=halvings {
        let dt = dt0 / (1 << l) as f64;
        let spec = GridSpec::new(nx, 9, ly, dt, t0);
        let (error, res) = transient.run(spec, params)?;
        et.push(error);
        levels.push(MmsLevel { kind: "temporal", ny: 9, dt, error, interface_residual: res });
    }
    let max_interface_residual = levels.iter().map(|l| l.interface_residual).fold(0.0, f64::max);
    Ok(MmsReport { levels, spatial_rates: pairwise_rates(&es, 2.0), temporal_rates: pairwise_rates(&et, 2.0), max_interface_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mms_rates() {
        let params = PhysicalParams { rho1: 1.0, rho2: 0.8, mu1: 1.0, mu2: 0.5, sigma: 1.0 };
        let rep = mms_study(&params, 8, std::f64::consts::PI, 0.5, 9, 0.05, 3).unwrap();
        for l in &rep.levels {
            eprintln!("{:?}", l);
        }
        assert!(rep.spatial_rate() >= 1.8, "{:?}", rep.spatial_rates);
        assert!(rep.temporal_rate() >= 0.9, "{:?}", rep.temporal_rates);
        assert!(rep.max_interface_residual < 1e-8);
    }
}
