//! Phase indicator transported along backward characteristics.

use rayon::prelude::*;

use crate::grid::{cubic_weights, ColumnInterp, Grid, Side};
use crate::state::FlatState;

use super::graph::Graph;

/// A space-time velocity field `u(t, x, y)`.
pub trait VelocitySampler: Sync {
    fn velocity(&self, t: f64, x: f64, y: f64) -> [f64; 2];

    /// Half-height of the strip outside which the field is continued by zero.
    fn strip(&self) -> Option<f64> {
        None
    }
}

/// Velocity given in closed form.
pub struct AnalyticFlow<F: Fn(f64, f64, f64) -> [f64; 2] + Sync>(pub F);

impl<F: Fn(f64, f64, f64) -> [f64; 2] + Sync> VelocitySampler for AnalyticFlow<F> {
    fn velocity(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        (self.0)(t, x, y)
    }
}

/// Physical velocity `u(t, x, y) = u_hat(t, x, y - h(t, x))` of a flat
/// trajectory: periodic cubic in x, one-sided column cubic in y, cubic
/// Lagrange in time, zero outside the strip.
pub struct TrajectorySampler<'a> {
    grid: &'a Grid<f64>,
    z: &'a [FlatState<f64>],
    lower: ColumnInterp<f64>,
    upper: ColumnInterp<f64>,
}

impl<'a> TrajectorySampler<'a> {
    pub fn new(grid: &'a Grid<f64>, z: &'a [FlatState<f64>]) -> Self {
        let (ly, dy, ny) = (grid.spec.ly, grid.dy(), grid.ny());
        Self { grid, z, lower: ColumnInterp::new(-ly, dy, ny), upper: ColumnInterp::new(0.0, dy, ny) }
    }

    fn x_stencil(&self, x: f64) -> ([usize; 4], [f64; 4]) {
        let nx = self.grid.nx();
        let s = x.rem_euclid(std::f64::consts::TAU) / self.grid.dx();
        let i0 = s.floor();
        let (w, _) = cubic_weights([-1.0, 0.0, 1.0, 2.0], s - i0);
        let i0 = i0 as usize % nx;
        (std::array::from_fn(|a| (i0 + nx + a - 1) % nx), w)
    }

    fn at_level(&self, m: usize, x: f64, y: f64) -> [f64; 2] {
        let st = &self.z[m];
        let (idx, wx) = self.x_stencil(x);
        let h: f64 = (0..4).map(|a| wx[a] * st.h[idx[a]]).sum();
        let yh = y - h;
        let ly = self.grid.spec.ly;
        if yh.abs() > ly {
            return [0.0; 2];
        }
        let (side, col) = if yh < 0.0 { (Side::Lower, &self.lower) } else { (Side::Upper, &self.upper) };
        let (start, wy, _, _) = col.weights(yh);
        let (u, v) = (st.u.x.side(side), st.u.y.side(side));
        let mut out = [0.0; 2];
        for a in 0..4 {
            for b in 0..4 {
                let w = wx[a] * wy[b];
                out[0] += w * u[(idx[a], start + b)];
                out[1] += w * v[(idx[a], start + b)];
            }
        }
        out
    }
}

impl VelocitySampler for TrajectorySampler<'_> {
    fn velocity(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let last = self.z.len() - 1;
        if last == 0 {
            return self.at_level(0, x, y);
        }
        let s = (t / self.grid.spec.dt).clamp(0.0, last as f64);
        if last < 3 {
            let k = (s.floor() as usize).min(last - 1);
            let th = s - k as f64;
            let (a, b) = (self.at_level(k, x, y), self.at_level(k + 1, x, y));
            return [(1.0 - th) * a[0] + th * b[0], (1.0 - th) * a[1] + th * b[1]];
        }
        let k0 = (s.floor() as usize).saturating_sub(1).min(last - 3);
        let nodes = std::array::from_fn(|a| (k0 + a) as f64);
        let (w, _) = cubic_weights(nodes, s);
        let mut out = [0.0; 2];
        for (a, wa) in w.iter().enumerate() {
            let u = self.at_level(k0 + a, x, y);
            out[0] += wa * u[0];
            out[1] += wa * u[1];
        }
        out
    }

    fn strip(&self) -> Option<f64> {
        Some(self.grid.spec.ly)
    }
}

/// Backward characteristic integration by classical RK4.
pub struct CharacteristicFlow<'a> {
    pub sampler: &'a dyn VelocitySampler,
    pub step: f64,
}

impl CharacteristicFlow<'_> {
    /// Foot `X(0)` of the characteristic through `(x, y)` at time `t`, and
    /// whether it left the strip on the way.
    pub fn foot(&self, t: f64, x: f64, y: f64) -> ([f64; 2], bool) {
        let n = (t / self.step).ceil().max(0.0) as usize;
        let mut p = [x, y];
        let mut exited = false;
        if n == 0 {
            return (p, exited);
        }
        let h = -t / n as f64;
        let u = |s: f64, q: [f64; 2]| self.sampler.velocity(s, q[0], q[1]);
        for k in 0..n {
            let s = t + h * k as f64;
            let k1 = u(s, p);
            let k2 = u(s + 0.5 * h, [p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1]]);
            let k3 = u(s + 0.5 * h, [p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1]]);
            let k4 = u(s + h, [p[0] + h * k3[0], p[1] + h * k3[1]]);
            for c in 0..2 {
                p[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            if let Some(ly) = self.sampler.strip() {
                exited |= p[1].abs() > ly;
            }
        }
        (p, exited)
    }
}

/// `alpha(t, x, y) = 1_{y0 < h0(x0)}` at the foot `(x0, y0)` of the
/// characteristic.
pub struct PhaseField<'a> {
    pub flow: CharacteristicFlow<'a>,
    pub h0: &'a dyn Graph,
}

impl PhaseField<'_> {
    pub fn alpha(&self, t: f64, x: f64, y: f64) -> u8 {
        let ([x0, y0], exited) = self.flow.foot(t, x, y);
        if exited {
            log::debug!("characteristic through ({x}, {y}) at t = {t} left the strip");
        }
        u8::from(y0 < self.h0.eval(x0)[0])
    }

    /// Height of the `alpha = 1` region in column `x`, by bisection within
    /// `[lo, hi]` (`alpha(lo) = 1`, `alpha(hi) = 0` assumed).
    pub fn interface_height(&self, t: f64, x: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.alpha(t, x, mid) == 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Area of the symmetric difference between `{alpha(t) = 1}` and
/// `{y < h(x)}` over one period, from `n` uniform columns. Each column is
/// bracketed within `reach` of `h`.
pub fn symmetric_difference(phase: &PhaseField<'_>, t: f64, h: &dyn Graph, n: usize, reach: f64) -> f64 {
    let dx = std::f64::consts::TAU / n as f64;
    let parts: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * dx;
            let hv = h.eval(x)[0];
            (phase.interface_height(t, x, hv - reach, hv + reach, 1e-12) - hv).abs()
        })
        .collect();
    parts.iter().sum::<f64>() * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GridSpec;
    use crate::vof::graph::{cosine, FnGraph};

    #[test]
    fn zero_flow_keeps_initial_phase() {
        let flow = AnalyticFlow(|_, _, _| [0.0; 2]);
        let h0 = cosine(0.2, 1.0);
        let ph = PhaseField { flow: CharacteristicFlow { sampler: &flow, step: 0.01 }, h0: &h0 };
        for (x, y) in [(0.0, 0.19), (0.0, 0.21), (3.0, -0.19), (3.0, -0.21)] {
            assert_eq!(ph.alpha(0.7, x, y), u8::from(y < h0.eval(x)[0]));
        }
    }

    #[test]
    fn uniform_vertical_flow_lifts_interface() {
        let c = 0.3;
        let flow = AnalyticFlow(move |_, _, _| [0.0, c]);
        let h0 = cosine(0.2, 1.0);
        let ph = PhaseField { flow: CharacteristicFlow { sampler: &flow, step: 0.01 }, h0: &h0 };
        let t = 0.5;
        let lifted = FnGraph(move |x: f64| {
            let [a, b, d] = h0.eval(x);
            [a + c * t, b, d]
        });
        assert!(symmetric_difference(&ph, t, &lifted, 32, 0.1) < 1e-10);
    }

    #[test]
    fn divergence_free_flow_conserves_area() {
        // stream function 0.1 sin(x) cos(y)
        let flow = AnalyticFlow(|_, x: f64, y: f64| [-0.1 * x.sin() * y.sin(), -0.1 * x.cos() * y.cos()]);
        let h0 = cosine(0.2, 1.0);
        let ph = PhaseField { flow: CharacteristicFlow { sampler: &flow, step: 0.01 }, h0: &h0 };
        let n = 64;
        let dx = std::f64::consts::TAU / n as f64;
        let mean: f64 = (0..n).map(|i| ph.interface_height(1.0, i as f64 * dx, -0.6, 0.6, 1e-12)).sum::<f64>() * dx;
        assert!(mean.abs() < 1e-6, "{mean}");
    }

    #[test]
    fn trajectory_sampler_reproduces_smooth_fields() {
        let grid = crate::Grid::new(GridSpec::new(32, 33, 2.0, 0.1, 0.5)).unwrap();
        let z: Vec<FlatState<f64>> = (0..=5)
            .map(|m| {
                let t = 0.1 * m as f64;
                let mut s = FlatState::zeros(&grid);
                s.h = grid.xs().mapv(|x| 0.1 * x.cos());
                s.u.x = crate::grid::ScalarField2D::from_fn(&grid, |x, y, _| (1.0 + t) * x.sin() * (1.0 - y * y / 4.0));
                s
            })
            .collect();
        let smp = TrajectorySampler::new(&grid, &z);
        let (t, x, y): (f64, f64, f64) = (0.23, 1.1, 0.4);
        let yh = y - 0.1 * x.cos();
        let u = smp.velocity(t, x, y);
        assert!((u[0] - (1.0 + t) * x.sin() * (1.0 - yh * yh / 4.0)).abs() < 1e-4, "{u:?}");
        assert_eq!(smp.velocity(t, x, 2.5), [0.0, 0.0]);
    }
}
