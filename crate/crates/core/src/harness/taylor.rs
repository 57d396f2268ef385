//! Taylor tests of the control-to-state map.

use crate::error::Result;
use crate::fixed_point::{solve_forward, solve_sensitivity, Control, Direction, FixedPointOptions};
use crate::grid::{Grid, PhysicalField2D, ScalarField2D, VectorField2D};
use crate::state::{trajectory_axpy, trajectory_norm, FlatState};
use crate::stokes::StokesSolver;
use crate::transform::{physical_sensitivity, to_physical};

use super::data::BaseData;
use super::stats::loglog_slope;

/// Norm in which remainders are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaylorNorm {
    /// Flat-coordinate trajectory norm of the full state.
    Flat,
    /// `max_m ||.||_{L^p}` of the physical velocity, `p = p_diag`.
    Physical,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TaylorRow {
    pub direction: usize,
    pub s: f64,
    /// `||z(c + s d) - z(c) - s dz||`.
    pub remainder: f64,
    /// `remainder / s`.
    pub quotient_error: f64,
    /// Physical norm only: the remainder without the interface band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_band: Option<f64>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TaylorReport {
    pub rows: Vec<TaylorRow>,
    /// Fitted log-log slope of the remainder per direction; `None` when the
    /// remainders are all zero.
    pub slopes: Vec<Option<f64>>,
}

impl TaylorReport {
    pub fn degenerate(&self) -> bool {
        self.slopes.iter().all(Option::is_none)
    }

    pub fn slope_range(&self) -> (f64, f64) {
        range(self.slopes.iter().flatten().copied())
    }

    /// Fitted slopes of the band-free physical remainder, per direction.
    pub fn off_band_slopes(&self) -> Vec<Option<f64>> {
        (0..self.slopes.len())
            .map(|d| {
                let (s, r): (Vec<f64>, Vec<f64>) =
                    self.rows.iter().filter(|row| row.direction == d).filter_map(|row| row.off_band.map(|o| (row.s, o))).unzip();
                loglog_slope(&s, &r)
            })
            .collect()
    }

    pub fn off_band_slope_range(&self) -> (f64, f64) {
        range(self.off_band_slopes().into_iter().flatten())
    }
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)))
}

fn comp(u: &VectorField2D<f64>, c: usize) -> &ScalarField2D<f64> {
    if c == 0 { &u.x } else { &u.y }
}

/// Physical-norm remainder, in full and without the interface band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalRemainder {
    pub full: f64,
    /// Same norm with the nodes between `h` and `h^s` left out. Those nodes
    /// change phase, so the kink of `u` across the interface makes their
    /// error first order in `s`.
    pub off_band: f64,
}

/// `max_m max_c ||u_c^s - u_c - s du_c||_{L^p}` in physical coordinates,
/// over the nodes that lie inside both computational strips
/// `|y - h| <= Ly` and `|y - h^s| <= Ly`. Outside that window one of the
/// fields is a continuation past the far-field truncation.
pub fn physical_remainder(
    grid: &Grid<f64>,
    zs: &[FlatState<f64>],
    z: &[FlatState<f64>],
    dz: &[FlatState<f64>],
    s: f64,
) -> PhysicalRemainder {
    let p = grid.spec.p_diag;
    let ly = grid.spec.ly;
    let mut out = PhysicalRemainder { full: 0.0, off_band: 0.0 };
    for ((a, b), d) in zs.iter().zip(z).zip(dz) {
        for c in 0..2 {
            let us = to_physical(grid, comp(&a.u, c), &a.h).field;
            let u = to_physical(grid, comp(&b.u, c), &b.h).field;
            let du = physical_sensitivity(grid, comp(&b.u, c), comp(&d.u, c), &b.h, &d.h).field;
            let mut values = &us.values - &u.values - &(&du.values * s);
            let mut band = values.clone();
            for ((i, j), v) in values.indexed_iter_mut() {
                let y = PhysicalField2D::y(grid, j);
                if (y - a.h[i]).abs() > ly || (y - b.h[i]).abs() > ly {
                    *v = 0.0;
                }
                let crossed = (y < a.h[i]) != (y < b.h[i]);
                band[(i, j)] = if crossed { 0.0 } else { *v };
            }
            out.full = out.full.max(PhysicalField2D { values }.lp_norm(grid, p));
            out.off_band = out.off_band.max(PhysicalField2D { values: band }.lp_norm(grid, p));
        }
    }
    out
}

/// For each direction: one sensitivity solve and one perturbed forward solve
/// per `s`, reusing the base solution.
pub fn taylor_test(
    solver: &StokesSolver<f64>,
    base: &BaseData,
    directions: &[Direction<f64>],
    s_values: &[f64],
    norm: TaylorNorm,
    opts: &FixedPointOptions<f64>,
) -> Result<TaylorReport> {
    let grid = solver.grid();
    let (z, _) = solve_forward(solver, &base.u0, &base.h0, &base.control, opts)?;
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for (k, d) in directions.iter().enumerate() {
        let (dz, _) = solve_sensitivity(solver, &z, &base.control, d, opts, None)?;
        let mut rem = Vec::new();
        for &s in s_values {
            let control: Control<f64> = base.control.axpy(s, &d.dc)?;
            let u0 = base.u0.axpy(s, &d.du0);
            let (zs, _) = solve_forward(solver, &u0, &base.h0, &control, opts)?;
            let (r, off_band) = match norm {
                TaylorNorm::Flat => {
                    let lin = trajectory_axpy(&z, s, &dz);
                    (trajectory_norm(grid, &trajectory_axpy(&zs, -1.0, &lin)), None)
                }
                TaylorNorm::Physical => {
                    let pr = physical_remainder(grid, &zs, &z, &dz, s);
                    (pr.full, Some(pr.off_band))
                }
            };
            rows.push(TaylorRow { direction: k, s, remainder: r, quotient_error: r / s, off_band });
            rem.push(r);
        }
        slopes.push(if rem.iter().all(|r| *r == 0.0) { None } else { loglog_slope(s_values, &rem) });
    }
    Ok(TaylorReport { rows, slopes })
}
