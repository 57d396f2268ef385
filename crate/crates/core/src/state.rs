//! Discrete states and right-hand sides of the flat-interface problem.

use ndarray::Array1;

use crate::grid::{Grid, ScalarField2D, VectorField2D};
use crate::scalar::Real;

fn line_l2<T: Real>(grid: &Grid<T>, a: &Array1<T>) -> T {
    (a.iter().map(|v| *v * *v).sum::<T>() * grid.dx()).sqrt()
}

fn line_max<T: Real>(a: &Array1<T>) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// One time level of `(u_hat, pi, r, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatState<T> {
    pub u: VectorField2D<T>,
    pub pi: ScalarField2D<T>,
    /// Pressure jump `[pi]` at the interface.
    pub r: Array1<T>,
    pub h: Array1<T>,
}

/// Time levels `m = 0..=M`.
pub type Trajectory<T> = Vec<FlatState<T>>;

impl<T: Real> FlatState<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        Self {
            u: VectorField2D::zeros(nx, ny),
            pi: ScalarField2D::zeros(nx, ny),
            r: Array1::zeros(nx),
            h: Array1::zeros(nx),
        }
    }

    pub fn axpy(&self, a: T, other: &Self) -> Self {
        Self {
            u: self.u.axpy(a, &other.u),
            pi: self.pi.axpy(a, &other.pi),
            r: &self.r + &(&other.r * a),
            h: &self.h + &(&other.h * a),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { u: self.u.scaled(a), pi: self.pi.scaled(a), r: &self.r * a, h: &self.h * a }
    }

    /// Sum of the discrete `L^2` norms of the components.
    pub fn norm(&self, grid: &Grid<T>) -> T {
        let two = T::lit(2.0);
        self.u.x.lp_norm(grid, two) + self.u.y.lp_norm(grid, two) + self.pi.lp_norm(grid, two) + line_l2(grid, &self.r) + line_l2(grid, &self.h)
    }

    pub fn max_abs(&self) -> T {
        self.u.max_abs().max(self.pi.max_abs()).max(line_max(&self.r)).max(line_max(&self.h))
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.pi.is_finite() && self.r.iter().chain(self.h.iter()).all(|v| v.is_finite())
    }
}

/// `(f, f_d, g_v, g_w, g_h)` at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsTuple<T> {
    pub f: VectorField2D<T>,
    pub fd: ScalarField2D<T>,
    pub gv: Array1<T>,
    pub gw: Array1<T>,
    pub gh: Array1<T>,
}

impl<T: Real> RhsTuple<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        Self {
            f: VectorField2D::zeros(nx, ny),
            fd: ScalarField2D::zeros(nx, ny),
            gv: Array1::zeros(nx),
            gw: Array1::zeros(nx),
            gh: Array1::zeros(nx),
        }
    }

    pub fn axpy(&self, a: T, other: &Self) -> Self {
        Self {
            f: self.f.axpy(a, &other.f),
            fd: self.fd.axpy(a, &other.fd),
            gv: &self.gv + &(&other.gv * a),
            gw: &self.gw + &(&other.gw * a),
            gh: &self.gh + &(&other.gh * a),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { f: self.f.scaled(a), fd: self.fd.scaled(a), gv: &self.gv * a, gw: &self.gw * a, gh: &self.gh * a }
    }

    pub fn norm(&self, grid: &Grid<T>) -> T {
        let two = T::lit(2.0);
        self.f.x.lp_norm(grid, two)
            + self.f.y.lp_norm(grid, two)
            + self.fd.lp_norm(grid, two)
            + line_l2(grid, &self.gv)
            + line_l2(grid, &self.gw)
            + line_l2(grid, &self.gh)
    }

    pub fn max_abs(&self) -> T {
        self.f
            .max_abs()
            .max(self.fd.max_abs())
            .max(line_max(&self.gv))
            .max(line_max(&self.gw))
            .max(line_max(&self.gh))
    }
}

/// Maximum over time levels of the per-level [`FlatState::norm`].
pub fn trajectory_norm<T: Real>(grid: &Grid<T>, z: &[FlatState<T>]) -> T {
    z.iter().map(|s| s.norm(grid)).fold(T::zero(), T::max)
}

/// Level-wise `a + s * b`.
pub fn trajectory_axpy<T: Real>(a: &[FlatState<T>], s: T, b: &[FlatState<T>]) -> Trajectory<T> {
    a.iter().zip(b).map(|(x, y)| x.axpy(s, y)).collect()
}
