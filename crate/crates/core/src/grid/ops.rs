use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

use super::{Grid, ScalarField2D, Side};

/// Whether y-differences may reach across the interface row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sidedness {
    /// Each half-strip is differentiated on its own nodes only.
    OneSided,
    /// The two halves are treated as one continuous column (field must be
    /// continuous at `y = 0`).
    Across,
}

fn d1_column<T: Real>(c: ArrayView1<T>, dy: T, out: &mut [T]) {
    let n = c.len();
    let h2 = lit::<T>(2.0) * dy;
    out[0] = (lit::<T>(-3.0) * c[0] + lit::<T>(4.0) * c[1] - c[2]) / h2;
    for j in 1..n - 1 {
        out[j] = (c[j + 1] - c[j - 1]) / h2;
    }
    out[n - 1] = (lit::<T>(3.0) * c[n - 1] - lit::<T>(4.0) * c[n - 2] + c[n - 3]) / h2;
}

fn d2_column<T: Real>(c: ArrayView1<T>, dy: T, out: &mut [T]) {
    let n = c.len();
    let dd = dy * dy;
    let (two, four, five) = (lit::<T>(2.0), lit::<T>(4.0), lit::<T>(5.0));
    out[0] = (two * c[0] - five * c[1] + four * c[2] - c[3]) / dd;
    for j in 1..n - 1 {
        out[j] = (c[j + 1] - two * c[j] + c[j - 1]) / dd;
    }
    out[n - 1] = (two * c[n - 1] - five * c[n - 2] + four * c[n - 3] - c[n - 4]) / dd;
}

fn apply_columns<T: Real>(
    f: &ScalarField2D<T>,
    sided: Sidedness,
    dy: T,
    kernel: fn(ArrayView1<T>, T, &mut [T]),
) -> ScalarField2D<T> {
    let (nx, ny) = (f.nx(), f.ny());
    let mut out = ScalarField2D::zeros(nx, ny);
    match sided {
        Sidedness::OneSided => {
            let mut buf = vec![T::zero(); ny];
            for side in Side::BOTH {
                for i in 0..nx {
                    kernel(f.side(side).row(i), dy, &mut buf);
                    out.side_mut(side).row_mut(i).assign(&ArrayView1::from(&buf[..]));
                }
            }
        }
        Sidedness::Across => {
            let n = 2 * ny - 1;
            let mut col = Array1::zeros(n);
            let mut buf = vec![T::zero(); n];
            for i in 0..nx {
                for j in 0..ny {
                    col[j] = f.lower[(i, j)];
                    col[ny - 1 + j] = f.upper[(i, j)];
                }
                kernel(col.view(), dy, &mut buf);
                for j in 0..ny {
                    out.lower[(i, j)] = buf[j];
                    out.upper[(i, j)] = buf[ny - 1 + j];
                }
            }
        }
    }
    out
}

/// Second-order finite-difference `d/dy`.
///
/// With [`Sidedness::OneSided`] the interface rows use one-sided stencils so
/// kinks and jumps at `y = 0` are resolved per side.
pub fn ddy<T: Real>(grid: &Grid<T>, f: &ScalarField2D<T>, sided: Sidedness) -> Result<ScalarField2D<T>> {
    if f.ny() < 4 {
        return Err(Error::TooFewNodes { needed: 4, got: f.ny() });
    }
    Ok(apply_columns(f, sided, grid.dy(), d1_column))
}

/// Second-order finite-difference `d^2/dy^2`.
pub fn ddy2<T: Real>(grid: &Grid<T>, f: &ScalarField2D<T>, sided: Sidedness) -> Result<ScalarField2D<T>> {
    if f.ny() < 4 {
        return Err(Error::TooFewNodes { needed: 4, got: f.ny() });
    }
    Ok(apply_columns(f, sided, grid.dy(), d2_column))
}

impl<T: Real> Grid<T> {
    pub(crate) fn dy1(&self, f: &ScalarField2D<T>) -> ScalarField2D<T> {
        apply_columns(f, Sidedness::OneSided, self.dy(), d1_column)
    }

    pub(crate) fn dy2(&self, f: &ScalarField2D<T>) -> ScalarField2D<T> {
        apply_columns(f, Sidedness::OneSided, self.dy(), d2_column)
    }
}

/// One-sided interface traces and the jump `upper - lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceJump<T> {
    pub lower: Array1<T>,
    pub upper: Array1<T>,
    pub jump: Array1<T>,
}

impl<T: Real> TraceJump<T> {
    /// The common trace if `|jump| <= tol` everywhere.
    pub fn continuous_trace(&self, tol: T) -> Option<&Array1<T>> {
        self.jump.iter().all(|j| j.abs() <= tol).then_some(&self.upper)
    }
}

pub fn trace_jump<T: Real>(f: &ScalarField2D<T>) -> TraceJump<T> {
    let lower = f.interface_trace(Side::Lower);
    let upper = f.interface_trace(Side::Upper);
    let jump = &upper - &lower;
    TraceJump { lower, upper, jump }
}

fn trapezoid_rows<T: Real>(a: &Array2<T>, dy: T) -> T {
    let ny = a.ncols();
    let half = lit::<T>(0.5);
    let mut s = T::zero();
    for row in a.rows() {
        let mut r = half * (row[0] + row[ny - 1]);
        for j in 1..ny - 1 {
            r += row[j];
        }
        s += r * dy;
    }
    s
}

/// Periodic trapezoid in x times trapezoid in y over one half-strip.
pub fn integrate_half<T: Real>(grid: &Grid<T>, f: &ScalarField2D<T>, side: Side) -> T {
    trapezoid_rows(f.side(side), grid.dy()) * grid.dx()
}

pub fn integrate_full<T: Real>(grid: &Grid<T>, f: &ScalarField2D<T>) -> T {
    integrate_half(grid, f, Side::Lower) + integrate_half(grid, f, Side::Upper)
}

/// Integral over one x-period of an interface field (spectrally exact for
/// resolved trigonometric polynomials).
pub fn integrate_line<T: Real>(grid: &Grid<T>, f: &Array1<T>) -> T {
    f.iter().copied().sum::<T>() * grid.dx()
}

/// Surface integral over the graph `y = h(x)`: `int f sqrt(1 + h'^2) dx`.
/// With `h = None` the interface is flat.
pub fn integrate_interface<T: Real>(grid: &Grid<T>, f: &Array1<T>, h: Option<&Array1<T>>) -> T {
    match h {
        None => integrate_line(grid, f),
        Some(h) => {
            let hx = grid.dx1(h, 1);
            let w = ndarray::Zip::from(f).and(&hx).map_collect(|&a, &g| a * (T::one() + g * g).sqrt());
            integrate_line(grid, &w)
        }
    }
}
