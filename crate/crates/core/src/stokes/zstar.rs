use ndarray::{Array1, Array2};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField2D, Side, VectorField2D};
use crate::rhs::{assemble_n, check_compatibility, jump_pressure_r0, CompatibilityReport};
use crate::scalar::Real;
use crate::state::{FlatState, RhsTuple, Trajectory};
use crate::transform::extend_half_fields;

use super::band::BandMatrix;
use super::solver::{spectra_side, synth_side, StokesSolver};

/// Heat semigroup `e^{t d_xx}` on a periodic line: the multiplier
/// `exp(-k^2 t)` per Fourier mode.
pub fn heat_smooth<T: Real>(grid: &Grid<T>, g0: &Array1<T>, t: T) -> Result<Array1<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.as_f64()));
    }
    let out = grid.apply_multiplier(&g0.to_vec(), |_, k| Complex::new((-k * k * t).exp(), T::zero()));
    Ok(Array1::from(out))
}

/// Heat flow of a whole-strip column field, one implicit-Euler step per
/// time level, far-field rows kept at their decaying initial values.
/// Returns every level `m = 0..=steps`.
fn heat_strip<T: Real>(grid: &Grid<T>, f0: &Array2<T>, steps: usize) -> Vec<Array2<T>> {
    let rows = f0.ncols();
    let dt = grid.spec.dt;
    let dy = grid.dy();
    let spec0 = spectra_side(grid, f0);
    let nh = grid.nyquist();
    let zero = Complex::new(T::zero(), T::zero());
    let modes: Vec<Vec<Vec<Complex<T>>>> = (0..nh)
        .into_par_iter()
        .map(|m| {
            let k = grid.wavenumber(m);
            let mut a = BandMatrix::zeros(rows, 1, 1);
            let one = Complex::new(T::one(), T::zero());
            a.add(0, 0, one);
            a.add(rows - 1, rows - 1, one);
            let s = dt / (dy * dy);
            for j in 1..rows - 1 {
                a.add(j, j, Complex::new(T::one() + T::lit(2.0) * s + dt * k * k, T::zero()));
                a.add(j, j - 1, Complex::new(-s, T::zero()));
                a.add(j, j + 1, Complex::new(-s, T::zero()));
            }
            let lu = a.factor().expect("heat matrix is diagonally dominant");
            let mut cur: Vec<Complex<T>> = (0..rows).map(|j| spec0[(m, j)]).collect();
            let mut out = vec![cur.clone()];
            for n in 1..=steps {
                let decay = (-k * k * dt * T::of(n)).exp();
                cur[0] = spec0[(m, 0)] * decay;
                cur[rows - 1] = spec0[(m, rows - 1)] * decay;
                lu.solve_in_place(&mut cur);
                out.push(cur.clone());
            }
            out
        })
        .collect();
    (0..=steps)
        .map(|n| {
            let mut s = Array2::from_elem((nh, rows), zero);
            for m in 0..nh {
                for j in 0..rows {
                    s[(m, j)] = modes[m][n][j];
                }
            }
            synth_side(grid, &s)
        })
        .collect()
}

/// Joins the two halves of an extended field into one whole-strip column
/// array (interface row taken once).
fn whole_strip<T: Real>(f: &ScalarField2D<T>) -> Array2<T> {
    let (nx, ny) = (f.nx(), f.ny());
    Array2::from_shape_fn((nx, 2 * ny - 1), |(i, j)| if j < ny { f.lower[(i, j)] } else { f.upper[(i, j + 1 - ny)] })
}

fn restrict<T: Real>(a: &Array2<T>, side: Side, ny: usize) -> Array2<T> {
    let start = match side {
        Side::Lower => 0,
        Side::Upper => ny - 1,
    };
    a.slice(ndarray::s![.., start..start + ny]).to_owned()
}

/// Reference solution `z*` solving `L z* = (0, f_d*, g*, g_h*)` with the
/// given initial data, and its right-hand side `R*`.
///
/// `g*` and `g_h*` are heat-smoothed interface data of `(u0, h0)`; `f_d*` is
/// the y-derivative of the heat-evolved reflection extensions of
/// `v0 h0'`, restricted to each side.
pub fn construct_zstar<T: Real>(
    solver: &StokesSolver<T>,
    u0: &VectorField2D<T>,
    h0: &Array1<T>,
    tol: T,
) -> Result<(Trajectory<T>, Vec<RhsTuple<T>>, CompatibilityReport<T>)> {
    let grid = solver.grid();
    let params = solver.params();
    let report = check_compatibility(grid, params, u0, h0, tol);
    if !report.pass {
        return Err(Error::Incompatible(format!(
            "tangential {:e}, divergence {:e}, velocity jump {:e} (tolerance {:e})",
            report.max_tangential, report.max_divergence, report.max_velocity_jump, tol
        )));
    }
    let steps = grid.spec.n_steps();
    let ny = grid.ny();
    let r0 = jump_pressure_r0(grid, params, u0, h0);
    let z0 = FlatState { u: u0.clone(), pi: ScalarField2D::zeros(grid.nx(), ny), r: r0, h: h0.clone() };
    let n0 = assemble_n(grid, params, &z0);
    let g = grid.dx1(h0, 1);
    let cd0 = u0.x.mul_line(&g);
    let (lo_ext, up_ext) = extend_half_fields(grid, &cd0);
    let lo_flow = heat_strip(grid, &whole_strip(&lo_ext), steps);
    let up_flow = heat_strip(grid, &whole_strip(&up_ext), steps);
    let mut rhs = Vec::with_capacity(steps + 1);
    for m in 0..=steps {
        let t = grid.spec.dt * T::of(m);
        let cd = ScalarField2D { lower: restrict(&lo_flow[m], Side::Lower, ny), upper: restrict(&up_flow[m], Side::Upper, ny) };
        let mut r = RhsTuple::zeros(grid);
        r.fd = grid.dy1(&cd);
        r.gv = heat_smooth(grid, &n0.gv, t)?;
        r.gw = heat_smooth(grid, &n0.gw, t)?;
        r.gh = heat_smooth(grid, &n0.gh, t)?;
        rhs.push(r);
    }
    let z = solver.solve(&rhs, u0, h0)?;
    Ok((z, rhs, report))
}
