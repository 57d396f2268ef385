use ndarray::{Array1, Array2, Zip};

use crate::scalar::Real;

use super::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Phase 1, `y < 0` in flat coordinates.
    Lower,
    /// Phase 2, `y > 0`.
    Upper,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Lower, Side::Upper];

    /// Index of the interface row within this side's node range.
    pub fn interface_index(self, ny: usize) -> usize {
        match self {
            Side::Lower => ny - 1,
            Side::Upper => 0,
        }
    }
}

/// Nodal values on both half-strips, shape `(nx, ny)` per side.
///
/// Lower node `j` sits at `y = -Ly + j dy`, upper node `j` at `y = j dy`; the
/// interface row exists once on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D<T> {
    pub lower: Array2<T>,
    pub upper: Array2<T>,
}

impl<T: Real> ScalarField2D<T> {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { lower: Array2::zeros((nx, ny)), upper: Array2::zeros((nx, ny)) }
    }

    pub fn zeros_like(grid: &Grid<T>) -> Self {
        Self::zeros(grid.nx(), grid.ny())
    }

    /// Samples `f(x, y, side)` at every node.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T, T, Side) -> T) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let lower = Array2::from_shape_fn((nx, ny), |(i, j)| f(grid.x(i), grid.y(Side::Lower, j), Side::Lower));
        let upper = Array2::from_shape_fn((nx, ny), |(i, j)| f(grid.x(i), grid.y(Side::Upper, j), Side::Upper));
        Self { lower, upper }
    }

    pub fn side(&self, side: Side) -> &Array2<T> {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Array2<T> {
        match side {
            Side::Lower => &mut self.lower,
            Side::Upper => &mut self.upper,
        }
    }

    pub fn nx(&self) -> usize {
        self.lower.nrows()
    }

    pub fn ny(&self) -> usize {
        self.lower.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().chain(self.upper.iter()).all(|v| v.is_finite())
    }

    /// Trace on `side` at the interface row.
    pub fn interface_trace(&self, side: Side) -> Array1<T> {
        let j = side.interface_index(self.ny());
        self.side(side).column(j).to_owned()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { lower: self.lower.mapv(&f), upper: self.upper.mapv(&f) }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let mut out = self.clone();
        for side in Side::BOTH {
            Zip::from(out.side_mut(side)).and(other.side(side)).for_each(|a, &b| *a = f(*a, b));
        }
        out
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map(|v| v * a)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: T, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + a * y)
    }

    pub fn max_abs(&self) -> T {
        self.lower.iter().chain(self.upper.iter()).fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Discrete `L^p` norm with the nodal cell measure `dx dy`.
    pub fn lp_norm(&self, grid: &Grid<T>, p: T) -> T {
        let s: T = self.lower.iter().chain(self.upper.iter()).map(|v| v.abs().powf(p)).sum();
        (s * grid.dx() * grid.dy()).powf(T::one() / p)
    }

    /// Multiplies every column `j` by the interface value `line[i]`.
    pub fn mul_line(&self, line: &Array1<T>) -> Self {
        let mut out = self.clone();
        for side in Side::BOTH {
            for (mut row, &l) in out.side_mut(side).rows_mut().into_iter().zip(line.iter()) {
                row.mapv_inplace(|v| v * l);
            }
        }
        out
    }

    /// Broadcasts an interface field along y on both sides.
    pub fn from_line(line: &Array1<T>, ny: usize) -> Self {
        let nx = line.len();
        let a = Array2::from_shape_fn((nx, ny), |(i, _)| line[i]);
        Self { lower: a.clone(), upper: a }
    }
}

/// A vector field with components `(x, y)` stored as two [`ScalarField2D`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2D<T> {
    pub x: ScalarField2D<T>,
    pub y: ScalarField2D<T>,
}

impl<T: Real> VectorField2D<T> {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { x: ScalarField2D::zeros(nx, ny), y: ScalarField2D::zeros(nx, ny) }
    }

    pub fn axpy(&self, a: T, other: &Self) -> Self {
        Self { x: self.x.axpy(a, &other.x), y: self.y.axpy(a, &other.y) }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { x: self.x.scaled(a), y: self.y.scaled(a) }
    }

    pub fn max_abs(&self) -> T {
        self.x.max_abs().max(self.y.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Single-valued nodal field on the physical strip: node `j` at
/// `y = -Ly + j dy`, `j = 0..2 ny - 1`, shape `(nx, 2 ny - 1)`.
///
/// The physical interface `y = h(x)` generally falls between nodes; which
/// phase a node belongs to is decided by comparing against `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField2D<T> {
    pub values: Array2<T>,
}

impl<T: Real> PhysicalField2D<T> {
    pub fn n_rows(ny: usize) -> usize {
        2 * ny - 1
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { values: Array2::zeros((grid.nx(), Self::n_rows(grid.ny()))) }
    }

    pub fn y(grid: &Grid<T>, j: usize) -> T {
        -grid.spec.ly + grid.dy() * T::of(j)
    }

    pub fn from_fn(grid: &Grid<T>, f: impl Fn(T, T) -> T) -> Self {
        let rows = Self::n_rows(grid.ny());
        Self { values: Array2::from_shape_fn((grid.nx(), rows), |(i, j)| f(grid.x(i), Self::y(grid, j))) }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Discrete `L^p` norm with the `dx dy` cell measure.
    pub fn lp_norm(&self, grid: &Grid<T>, p: T) -> T {
        let s: T = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s * grid.dx() * grid.dy()).powf(T::one() / p)
    }
}
