//! Residuals of the VoF weak forms evaluated on computed trajectories.
//!
//! Bulk integrals run over the flat nodes of each phase (the map
//! `y = y_hat + h(x)` has unit Jacobian) with the periodic trapezoid in x and
//! the trapezoid in `y_hat`. Interface traces are summed over the x nodes. Time
//! integration sums over the time levels against the factor `tau`, which
//! vanishes at both ends. Surface terms use Gauss quadrature on the
//! trigonometric interpolant of the interface.

use ndarray::Array1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixed_point::Control;
use crate::grid::{Grid, PhysicalParams, ScalarField2D, Side};
use crate::state::FlatState;
use crate::transform::pullback_control;

use super::graph::{spectral_graph, wrap};
use super::kernel::MollifierSpec;
use super::surface::{surface_term_eps_with, surface_variation_eps_with};
use super::testfn::{Bump, TimeBump, VectorBump, VectorJet};

/// How `d_t (rho u)` is paired with the time factor `tau`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub enum TimePairing {
    /// `-sum_m rho u^m (tau_{m+1} - tau_m)`: summation by parts of the
    /// backward difference, exact for the implicit-Euler increments.
    #[default]
    Summation,
    /// `-sum_m dt rho u^m tau'(t_m)`, which adds an `O(dt)` quadrature error.
    Analytic,
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ResidualOptions {
    pub mollifier: MollifierSpec,
    pub time: TimePairing,
}

impl ResidualOptions {
    pub fn new(mollifier: MollifierSpec) -> Self {
        Self { mollifier, time: TimePairing::default() }
    }
}

/// Gauss panel width for the surface terms, which are integrated on the
/// trigonometric interpolant of `h` rather than on the x nodes.
const SURFACE_PANEL: f64 = 0.05;

/// Named term totals and the resulting residuals.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ResidualReport {
    pub terms: Vec<(String, f64)>,
    /// Signed sum of the momentum terms.
    pub momentum: f64,
    /// Sum of the absolute term totals.
    pub momentum_scale: f64,
    pub divergence: f64,
    pub divergence_scale: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a.abs() / b
    }
}

impl ResidualReport {
    pub fn relative(&self) -> f64 {
        ratio(self.momentum, self.momentum_scale)
    }

    pub fn divergence_relative(&self) -> f64 {
        ratio(self.divergence, self.divergence_scale)
    }

    fn finish(names: &[&str], totals: &[f64], div: f64, div_scale: f64) -> Self {
        Self {
            terms: names.iter().zip(totals).map(|(n, v)| (n.to_string(), *v)).collect(),
            momentum: totals.iter().sum(),
            momentum_scale: totals.iter().map(|v| v.abs()).sum(),
            divergence: div,
            divergence_scale: div_scale,
        }
    }
}

/// Physical velocity gradient `[i][j] = d_j u_i` and related data on the
/// flat nodes of one level.
struct Kinematics {
    u: [ScalarField2D<f64>; 2],
    grad: [[ScalarField2D<f64>; 2]; 2],
}

/// Physical `(d_x, d_y)` of a flat field: `(F_x - h' F_y, F_y)`.
fn physical_grad(grid: &Grid<f64>, f: &ScalarField2D<f64>, hp: &Array1<f64>) -> [ScalarField2D<f64>; 2] {
    let fy = grid.dy1(f);
    let fx = grid.dx2d(f, 1).zip_with(&fy.mul_line(hp), |a, b| a - b);
    [fx, fy]
}

fn kinematics(grid: &Grid<f64>, u: [ScalarField2D<f64>; 2], hp: &Array1<f64>) -> Kinematics {
    let grad = [physical_grad(grid, &u[0], hp), physical_grad(grid, &u[1], hp)];
    Kinematics { u, grad }
}

/// `f - d_y f * dh`: the physical variation of a flat field at a fixed
/// physical point.
fn at_fixed_point(grid: &Grid<f64>, f: &ScalarField2D<f64>, df: &ScalarField2D<f64>, dh: &Array1<f64>) -> ScalarField2D<f64> {
    df.zip_with(&grid.dy1(f).mul_line(dh), |a, b| a - b)
}

fn flat_control(grid: &Grid<f64>, control: &Control<f64>, m: usize, h: &Array1<f64>) -> Result<[ScalarField2D<f64>; 2]> {
    Ok(match control {
        Control::Flat(c) => [c[m].x.clone(), c[m].y.clone()],
        Control::Physical(c) => [
            pullback_control(grid, &c[m].x, h, None)?.0.field,
            pullback_control(grid, &c[m].y, h, None)?.0.field,
        ],
    })
}

fn trap_weight(grid: &Grid<f64>, j: usize) -> f64 {
    let w = grid.dy() * grid.dx();
    if j == 0 || j == grid.ny() - 1 {
        0.5 * w
    } else {
        w
    }
}

fn in_window(b: &Bump, x: f64) -> bool {
    wrap(x - b.x0).abs() < b.a
}

/// Sums `f(i, j, side, y)` over the flat nodes where the bump column is
/// active.
fn bulk_sum<const N: usize>(grid: &Grid<f64>, b: &Bump, h: &Array1<f64>, f: impl Fn(usize, usize, Side, f64) -> [f64; N] + Sync) -> [f64; N] {
    (0..grid.nx())
        .into_par_iter()
        .filter(|&i| in_window(b, grid.x(i)))
        .map(|i| {
            let mut acc = [0.0; N];
            for side in Side::BOTH {
                for j in 0..grid.ny() {
                    let y = grid.y(side, j) + h[i];
                    if (y - b.y0).abs() >= b.b {
                        continue;
                    }
                    let w = trap_weight(grid, j);
                    let v = f(i, j, side, y);
                    for k in 0..N {
                        acc[k] += w * v[k];
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0; N], |a, b| std::array::from_fn(|k| a[k] + b[k]))
}

fn contract(a: [[f64; 2]; 2], d: &[[f64; 2]; 2]) -> f64 {
    (0..2).map(|i| (0..2).map(|j| a[i][j] * d[i][j]).sum::<f64>()).sum()
}

fn grad_at(k: &Kinematics, side: Side, i: usize, j: usize) -> [[f64; 2]; 2] {
    std::array::from_fn(|a| std::array::from_fn(|b| k.grad[a][b].side(side)[(i, j)]))
}

fn vel_at(k: &Kinematics, side: Side, i: usize, j: usize) -> [f64; 2] {
    [k.u[0].side(side)[(i, j)], k.u[1].side(side)[(i, j)]]
}

fn strain(g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    std::array::from_fn(|a| std::array::from_fn(|b| g[a][b] + g[b][a]))
}

fn check(grid: &Grid<f64>, z: &[FlatState<f64>], control: &Control<f64>) -> Result<()> {
    let want = grid.spec.n_steps() + 1;
    if z.len() != want || control.levels() != want {
        return Err(Error::Shape(format!("expected {want} time levels")));
    }
    Ok(())
}

/// Residual of the forward VoF momentum balance tested with
/// `phi(x, y) tau(t)`, plus the divergence residual tested with
/// `psi(x, y) tau(t)`.
///
/// The momentum terms are `-rho u.phi tau'` (see [`TimePairing`]), `-rho u_i u_j d_j phi_i tau`,
/// `S(u, q) : grad phi tau`, `-c.phi tau` and the mollified surface term
/// `-tau int sigma n_eps^T (D phi - div(phi) I)(x, h) (-h', 1) dx`.
pub fn vof_forward_residual(
    grid: &Grid<f64>,
    params: &PhysicalParams<f64>,
    z: &[FlatState<f64>],
    control: &Control<f64>,
    phi: &VectorBump,
    psi: &Bump,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let spec = &opts.mollifier;
    check(grid, z, control)?;
    let dt = grid.spec.dt;
    let time = TimeBump::on(dt * grid.spec.n_steps() as f64);
    let mut tot = [0.0; 5];
    let (mut div, mut div_scale) = (0.0, 0.0);
    for (m, st) in z.iter().enumerate() {
        let (tau, mut dtau) = time.eval(dt * m as f64);
        if opts.time == TimePairing::Summation {
            dtau = (time.eval(dt * (m + 1) as f64).0 - tau) / dt;
        }
        if tau == 0.0 && dtau == 0.0 {
            continue;
        }
        let hp = grid.dx1(&st.h, 1);
        let k = kinematics(grid, [st.u.x.clone(), st.u.y.clone()], &hp);
        let c = flat_control(grid, control, m, &st.h)?;
        let b = bulk_sum(grid, &phi.bump, &st.h, |i, j, side, y| {
            let x = grid.x(i);
            let jet = phi.jet(x, y);
            let (rho, mu) = (params.rho(side), params.mu(side));
            let u = vel_at(&k, side, i, j);
            let g = grad_at(&k, side, i, j);
            let q = st.pi.side(side)[(i, j)];
            let uphi = u[0] * jet.phi[0] + u[1] * jet.phi[1];
            let conv = contract(std::array::from_fn(|a| std::array::from_fn(|b| u[a] * u[b])), &jet.d);
            let stress = -q * jet.div + mu * contract(strain(g), &jet.d);
            let cphi = c[0].side(side)[(i, j)] * jet.phi[0] + c[1].side(side)[(i, j)] * jet.phi[1];
            [-rho * uphi * dtau, -rho * conv * tau, stress * tau, -cphi * tau]
        });
        let d = bulk_sum(grid, psi, &st.h, |i, j, side, y| {
            let p = psi.value(grid.x(i), y);
            let (ux, vy) = (k.grad[0][0].side(side)[(i, j)], k.grad[1][1].side(side)[(i, j)]);
            [p * (ux + vy), p.abs() * (ux.abs() + vy.abs())]
        });
        let graph = spectral_graph(grid, &st.h);
        let surf = surface_term_eps_with(&graph, phi, params.sigma, spec, SURFACE_PANEL)?;
        let w = dt;
        for a in 0..4 {
            tot[a] += w * b[a];
        }
        tot[4] -= w * tau * surf;
        div += w * tau * d[0];
        div_scale += w * tau.abs() * d[1];
    }
    Ok(ResidualReport::finish(&["time", "convection", "stress", "control", "surface"], &tot, div, div_scale))
}

fn interface_sum(grid: &Grid<f64>, b: &Bump, f: impl Fn(usize, f64) -> Result<f64> + Sync) -> Result<f64> {
    let parts: Vec<f64> = (0..grid.nx())
        .into_par_iter()
        .filter(|&i| in_window(b, grid.x(i)))
        .map(|i| f(i, grid.x(i)))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum::<f64>() * grid.dx())
}

/// Inputs of the linearized residual: base trajectory and control, flat
/// sensitivity trajectory and the control direction.
pub struct SensitivityInputs<'a> {
    pub z: &'a [FlatState<f64>],
    pub control: &'a Control<f64>,
    pub dz: &'a [FlatState<f64>],
    pub dcontrol: &'a Control<f64>,
}

/// Residual of the linearized VoF momentum balance tested with
/// `phi(x, y) tau(t)`, plus the linearized divergence residual.
///
/// Physical sensitivities are recovered on the flat nodes as
/// `du = du_hat - d_y u_hat dh`. The interface measure `d alpha` has density
/// `dh` on the graph, and the surface variation uses `nu_eps` and `dnu_eps`
/// at the interface.
pub fn vof_sensitivity_residual(
    grid: &Grid<f64>,
    params: &PhysicalParams<f64>,
    inp: &SensitivityInputs<'_>,
    phi: &VectorBump,
    psi: &Bump,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let spec = &opts.mollifier;
    check(grid, inp.z, inp.control)?;
    check(grid, inp.dz, inp.dcontrol)?;
    let dt = grid.spec.dt;
    let time = TimeBump::on(dt * grid.spec.n_steps() as f64);
    let (lo, up) = (Side::Lower.interface_index(grid.ny()), Side::Upper.interface_index(grid.ny()));
    let mut tot = [0.0; 7];
    let (mut div, mut div_scale) = (0.0, 0.0);
    for (m, (st, ds)) in inp.z.iter().zip(inp.dz).enumerate() {
        let (tau, mut dtau) = time.eval(dt * m as f64);
        if opts.time == TimePairing::Summation {
            dtau = (time.eval(dt * (m + 1) as f64).0 - tau) / dt;
        }
        if tau == 0.0 && dtau == 0.0 {
            continue;
        }
        let (h, dh) = (&st.h, &ds.h);
        let hp = grid.dx1(h, 1);
        let k = kinematics(grid, [st.u.x.clone(), st.u.y.clone()], &hp);
        let dk = kinematics(
            grid,
            [at_fixed_point(grid, &st.u.x, &ds.u.x, dh), at_fixed_point(grid, &st.u.y, &ds.u.y, dh)],
            &hp,
        );
        let dq = at_fixed_point(grid, &st.pi, &ds.pi, dh);
        let dc = match inp.dcontrol {
            Control::Flat(_) => {
                let c = flat_control(grid, inp.control, m, h)?;
                let d = flat_control(grid, inp.dcontrol, m, h)?;
                [at_fixed_point(grid, &c[0], &d[0], dh), at_fixed_point(grid, &c[1], &d[1], dh)]
            }
            Control::Physical(_) => flat_control(grid, inp.dcontrol, m, h)?,
        };
        let b = bulk_sum(grid, &phi.bump, h, |i, j, side, y| {
            let jet = phi.jet(grid.x(i), y);
            let (rho, mu) = (params.rho(side), params.mu(side));
            let u = vel_at(&k, side, i, j);
            let du = vel_at(&dk, side, i, j);
            let dg = grad_at(&dk, side, i, j);
            let duphi = du[0] * jet.phi[0] + du[1] * jet.phi[1];
            let conv = contract(std::array::from_fn(|a| std::array::from_fn(|b| du[a] * u[b] + u[a] * du[b])), &jet.d);
            let stress = -dq.side(side)[(i, j)] * jet.div + mu * contract(strain(dg), &jet.d);
            let cphi = dc[0].side(side)[(i, j)] * jet.phi[0] + dc[1].side(side)[(i, j)] * jet.phi[1];
            [-rho * duphi * dtau, -rho * conv * tau, stress * tau, -cphi * tau]
        });
        let d = bulk_sum(grid, psi, h, |i, j, side, y| {
            let p = psi.value(grid.x(i), y);
            let (ux, vy) = (dk.grad[0][0].side(side)[(i, j)], dk.grad[1][1].side(side)[(i, j)]);
            [p * (ux + vy), p.abs() * (ux.abs() + vy.abs())]
        });
        let graph = spectral_graph(grid, h);
        let dgraph = spectral_graph(grid, dh);
        let iface = |i: usize, x: f64| -> (VectorJet, [f64; 2], f64) {
            let jet = phi.jet(x, h[i]);
            let u = std::array::from_fn(|a| 0.5 * (k.u[a].lower[(i, lo)] + k.u[a].upper[(i, up)]));
            let stress = |side: Side, j: usize| {
                let g = grad_at(&k, side, i, j);
                let s = strain(g);
                let (q, mu) = (st.pi.side(side)[(i, j)], params.mu(side));
                
                contract(s, &jet.d) * mu - q * jet.div
            };
            (jet, u, stress(Side::Upper, up) - stress(Side::Lower, lo))
        };
        let density = interface_sum(grid, &phi.bump, |i, x| {
            let (jet, u, _) = iface(i, x);
            let adv: [f64; 2] = std::array::from_fn(|a| dtau * jet.phi[a] + tau * (u[0] * jet.d[a][0] + u[1] * jet.d[a][1]));
            Ok((params.rho2 - params.rho1) * (u[0] * adv[0] + u[1] * adv[1]) * dh[i])
        })?;
        let jump = interface_sum(grid, &phi.bump, |i, x| Ok(-tau * iface(i, x).2 * dh[i]))?;
        let surf = surface_variation_eps_with(&graph, &dgraph, phi, params.sigma, spec, SURFACE_PANEL)?;
        let w = dt;
        for a in 0..4 {
            tot[a] += w * b[a];
        }
        tot[4] += w * density;
        tot[5] += w * jump;
        tot[6] -= w * tau * surf;
        div += w * tau * d[0];
        div_scale += w * tau.abs() * d[1];
    }
    Ok(ResidualReport::finish(
        &["time", "convection", "stress", "control", "interface_density", "interface_stress", "surface"],
        &tot,
        div,
        div_scale,
    ))
}
