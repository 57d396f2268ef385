//! Changes of variables between the physical strip, where the interface is
//! `y = h(x)`, and flat coordinates with the interface at `y = 0`.
//!
//! Every column is handled by cubic interpolation whose stencils never
//! straddle the interface, so kinks and jumps survive the mapping.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::grid::{ColumnInterp, ColumnSample, Grid, PhysicalField2D, ScalarField2D, Side};
use crate::scalar::{lit, Real};

/// A mapped field together with the number of samples that fell outside the
/// strip and were clipped to the end value.
#[derive(Clone, Debug, PartialEq)]
pub struct Mapped<F> {
    pub field: F,
    pub clipped: usize,
}

/// Physical column split at the interface: nodes with `y_j < h` belong to
/// the lower phase.
struct SplitColumn<T> {
    split: usize,
    lower: ColumnInterp<T>,
    upper: ColumnInterp<T>,
}

impl<T: Real> SplitColumn<T> {
    fn new(grid: &Grid<T>, h: T) -> Result<Self> {
        let rows = PhysicalField2D::<T>::n_rows(grid.ny());
        let dy = grid.dy();
        let s = ((h + grid.spec.ly) / dy).ceil();
        let split = s.max(T::zero()).to_usize().unwrap_or(0).min(rows);
        if split < 4 || rows - split < 4 {
            return Err(Error::Incompatible(format!(
                "interface height {h} leaves fewer than 4 nodes on one side of the column"
            )));
        }
        let y0 = PhysicalField2D::<T>::y(grid, 0);
        let y_split = PhysicalField2D::<T>::y(grid, split);
        Ok(Self {
            split,
            lower: ColumnInterp::new(y0, dy, split),
            upper: ColumnInterp::new(y_split, dy, rows - split),
        })
    }

    fn sample(&self, col: ArrayView1<T>, y: T, side: Side) -> ColumnSample<T> {
        match side {
            Side::Lower => self.lower.sample(col.slice(ndarray::s![..self.split]), y),
            Side::Upper => self.upper.sample(col.slice(ndarray::s![self.split..]), y),
        }
    }
}

fn flat_interp<T: Real>(grid: &Grid<T>, side: Side) -> ColumnInterp<T> {
    let y0 = match side {
        Side::Lower => -grid.spec.ly,
        Side::Upper => T::zero(),
    };
    ColumnInterp::new(y0, grid.dy(), grid.ny())
}

/// `u_hat(x, y) = u(x, h(x) + y)` with one-sided interpolation about the
/// physical interface.
pub fn to_flat<T: Real>(grid: &Grid<T>, u: &PhysicalField2D<T>, h: &Array1<T>) -> Result<Mapped<ScalarField2D<T>>> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = ScalarField2D::zeros(nx, ny);
    let mut clipped = 0;
    for i in 0..nx {
        let col = u.values.row(i);
        let split = SplitColumn::new(grid, h[i])?;
        for side in Side::BOTH {
            for j in 0..ny {
                let s = split.sample(col, grid.y(side, j) + h[i], side);
                clipped += s.clipped as usize;
                out.side_mut(side)[(i, j)] = s.value;
            }
        }
    }
    Ok(Mapped { field: out, clipped })
}

/// Values and y-derivatives of `u_hat(x, y - h(x))` at the physical nodes.
fn physical_samples<T: Real>(grid: &Grid<T>, u: &ScalarField2D<T>, h: &Array1<T>) -> (Array2<T>, Array2<T>, usize) {
    let rows = PhysicalField2D::<T>::n_rows(grid.ny());
    let mut val = Array2::zeros((grid.nx(), rows));
    let mut der = Array2::zeros((grid.nx(), rows));
    let mut clipped = 0;
    let interps = [flat_interp(grid, Side::Lower), flat_interp(grid, Side::Upper)];
    for i in 0..grid.nx() {
        for j in 0..rows {
            let y = PhysicalField2D::<T>::y(grid, j);
            let side = if y < h[i] { Side::Lower } else { Side::Upper };
            let ci = &interps[side as usize];
            let s = ci.sample(u.side(side).row(i), y - h[i]);
            clipped += s.clipped as usize;
            val[(i, j)] = s.value;
            der[(i, j)] = s.deriv;
        }
    }
    (val, der, clipped)
}

/// `u(x, y) = u_hat(x, y - h(x))`, each node read from its own phase.
pub fn to_physical<T: Real>(grid: &Grid<T>, u: &ScalarField2D<T>, h: &Array1<T>) -> Mapped<PhysicalField2D<T>> {
    let (values, _, clipped) = physical_samples(grid, u, h);
    Mapped { field: PhysicalField2D { values }, clipped }
}

/// Reflection weights `(a_i, b_i)`: `E u(y) = sum a_i u(-b_i y)` reproduces
/// quadratics across `y = 0`.
pub const REFLECTION: [(f64, f64); 3] = [(15.0, 1.0 / 3.0), (-24.0, 2.0 / 3.0), (10.0, 1.0)];

/// Extends each half-strip to the whole strip by reflection.
///
/// Returns `(lower extended, upper extended)`; in each result the source side
/// is a bit-for-bit copy.
pub fn extend_half_fields<T: Real>(grid: &Grid<T>, u: &ScalarField2D<T>) -> (ScalarField2D<T>, ScalarField2D<T>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut lower_ext = u.clone();
    let mut upper_ext = u.clone();
    let ci_lo = flat_interp(grid, Side::Lower);
    let ci_up = flat_interp(grid, Side::Upper);
    for i in 0..nx {
        for j in 0..ny {
            let yu = grid.y(Side::Upper, j);
            let yl = grid.y(Side::Lower, j);
            let mut a = T::zero();
            let mut b = T::zero();
            for &(w, r) in REFLECTION.iter() {
                let (w, r) = (lit::<T>(w), lit::<T>(r));
                a += w * ci_lo.sample(u.lower.row(i), -r * yu).value;
                b += w * ci_up.sample(u.upper.row(i), -r * yl).value;
            }
            lower_ext.upper[(i, j)] = a;
            upper_ext.lower[(i, j)] = b;
        }
    }
    (lower_ext, upper_ext)
}

/// Derivative of [`to_physical`] in the direction `(du_hat, dh)`:
/// `du_hat(x, y - h) - d_y u_hat(x, y - h) dh(x)`, per phase.
///
/// `d_y u_hat` is the derivative of the same cubic interpolant that
/// [`to_physical`] uses.
pub fn physical_sensitivity<T: Real>(
    grid: &Grid<T>,
    u: &ScalarField2D<T>,
    du: &ScalarField2D<T>,
    h: &Array1<T>,
    dh: &Array1<T>,
) -> Mapped<PhysicalField2D<T>> {
    let (_, der, c1) = physical_samples(grid, u, h);
    let (dval, _, c2) = physical_samples(grid, du, h);
    let mut values = dval;
    for (mut row, (drow, &d)) in values.rows_mut().into_iter().zip(der.rows().into_iter().zip(dh.iter())) {
        row.zip_mut_with(&drow, |v, &dy| *v -= dy * d);
    }
    Mapped { field: PhysicalField2D { values }, clipped: c1.max(c2) }
}

/// Flat-coordinate control `c_hat(x, y) = c(x, y + h(x))` and, optionally,
/// its derivative `dc(x, y + h) + d_y c(x, y + h) dh` in the direction
/// `(dc, dh)`.
///
/// The control is taken to be smooth across the interface, so the whole
/// physical column is used for interpolation.
pub fn pullback_control<T: Real>(
    grid: &Grid<T>,
    c: &PhysicalField2D<T>,
    h: &Array1<T>,
    direction: Option<(&PhysicalField2D<T>, &Array1<T>)>,
) -> Result<(Mapped<ScalarField2D<T>>, Option<ScalarField2D<T>>)> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let rows = PhysicalField2D::<T>::n_rows(ny);
    let ci = ColumnInterp::new(PhysicalField2D::<T>::y(grid, 0), grid.dy(), rows);
    let mut out = ScalarField2D::zeros(nx, ny);
    let mut dout = direction.map(|_| ScalarField2D::zeros(nx, ny));
    let mut clipped = 0;
    for i in 0..nx {
        for side in Side::BOTH {
            for j in 0..ny {
                let y = grid.y(side, j) + h[i];
                let s = ci.sample(c.values.row(i), y);
                if !s.value.is_finite() {
                    return Err(Error::NonFinite("control"));
                }
                clipped += s.clipped as usize;
                out.side_mut(side)[(i, j)] = s.value;
                if let (Some((dc, dh)), Some(d)) = (direction, dout.as_mut()) {
                    let sd = ci.sample(dc.values.row(i), y);
                    d.side_mut(side)[(i, j)] = sd.value + s.deriv * dh[i];
                }
            }
        }
    }
    Ok((Mapped { field: out, clipped }, dout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid(nx: usize, ny: usize) -> Grid<f64> {
        Grid::new(GridSpec::new(nx, ny, 2.0, 0.1, 0.1)).unwrap()
    }

    fn max_diff(a: &ScalarField2D<f64>, b: &ScalarField2D<f64>) -> f64 {
        a.zip_with(b, |x, y| x - y).max_abs()
    }

    #[test]
    fn flat_interface_is_identity() {
        let gr = grid(16, 17);
        let h = Array1::zeros(16);
        let u = PhysicalField2D::from_fn(&gr, |x, y| x.sin() * (1.0 + y * y));
        let f = to_flat(&gr, &u, &h).unwrap();
        let back = to_physical(&gr, &f.field, &h);
        assert_eq!(f.clipped, 0);
        let err = (&back.field.values - &u.values).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn flat_linear_maps_to_shifted_linear() {
        let gr = grid(16, 33);
        let h = gr.xs().mapv(|x| 0.1 * x.cos());
        let uh = ScalarField2D::from_fn(&gr, |_, y, _| y);
        let u = to_physical(&gr, &uh, &h);
        for i in 0..16 {
            for j in 0..PhysicalField2D::<f64>::n_rows(33) {
                let y = PhysicalField2D::y(&gr, j);
                let s = y - h[i];
                let dy = gr.dy();
                let want = if s < -2.0 - dy { -2.0 } else if s > 2.0 + dy { 2.0 } else { s };
                assert!((u.field.values[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    fn round_trip_error(ny: usize) -> f64 {
        let gr = grid(16, ny);
        let h = gr.xs().mapv(|x| 0.1 * x.cos());
        let uh = ScalarField2D::from_fn(&gr, |x, y, s| {
            let k = if s == Side::Lower { 2.0 } else { 0.5 };
            x.sin() * (k * y).sin() + (-y * y).exp()
        });
        let u = to_physical(&gr, &uh, &h);
        let back = to_flat(&gr, &u.field, &h).unwrap();
        let mut err = 0.0f64;
        for side in Side::BOTH {
            for i in 0..16 {
                for j in 0..ny {
                    // away from the strip ends, where the shifted column is clipped
                    if gr.y(side, j).abs() < 1.5 {
                        err = err.max((back.field.side(side)[(i, j)] - uh.side(side)[(i, j)]).abs());
                    }
                }
            }
        }
        err
    }

    #[test]
    fn round_trip_converges_at_interpolation_order() {
        let e: Vec<f64> = [17, 33, 65].iter().map(|&n| round_trip_error(n)).collect();
        for w in e.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!(rate >= 3.0, "rates from {e:?}");
        }
    }

    #[test]
    fn extension_reproduces_quadratics() {
        let gr = grid(8, 17);
        let p = |y: f64| 1.0 - 0.5 * y + 0.25 * y * y;
        let u = ScalarField2D::from_fn(&gr, |_, y, _| p(y));
        let (lo, up) = extend_half_fields(&gr, &u);
        assert_eq!(lo.lower, u.lower);
        assert_eq!(up.upper, u.upper);
        assert!(max_diff(&lo, &u) < 1e-12);
        assert!(max_diff(&up, &u) < 1e-12);
    }

    #[test]
    fn sensitivity_of_linear_profile() {
        let gr = grid(16, 17);
        let h = gr.xs().mapv(|x| 0.05 * x.sin());
        let dh = gr.xs().mapv(|x| x.cos());
        let uh = ScalarField2D::from_fn(&gr, |_, y, _| y);
        let du = ScalarField2D::zeros(16, 17);
        let d = physical_sensitivity(&gr, &uh, &du, &h, &dh);
        for i in 0..16 {
            for j in 4..PhysicalField2D::<f64>::n_rows(17) - 4 {
                assert!((d.field.values[(i, j)] + dh[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pullback_derivative_matches_difference_quotient() {
        let gr = grid(16, 33);
        let c = PhysicalField2D::from_fn(&gr, |x, y| x.cos() * (-(y - 0.2).powi(2)).exp());
        let h = gr.xs().mapv(|x| 0.1 * x.sin());
        let dh = gr.xs().mapv(|x| (2.0 * x).cos());
        let dc = PhysicalField2D::zeros(&gr);
        let (base, d) = pullback_control(&gr, &c, &h, Some((&dc, &dh))).unwrap();
        let d = d.unwrap();
        let mut errs = vec![];
        for s in [1e-2, 5e-3] {
            let hs = &h + &(&dh * s);
            let (cs, _) = pullback_control(&gr, &c, &hs, None).unwrap();
            let q = cs.field.zip_with(&base.field, |a, b| (a - b) / s);
            errs.push(max_diff(&q, &d));
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 0.8, "{errs:?}");
    }
}
