use ndarray::Array1;
use crate::grid::{FourierSeries, Grid};

/// A periodic interface graph `y = h(x)` with two derivatives.
pub trait Graph: Sync {
    /// `(h, h', h'')` at `x`.
    fn eval(&self, x: f64) -> [f64; 3];
}

/// Wraps `x` into `(-pi, pi]` relative to a `2 pi` period.
pub fn wrap(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut r = x.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r -= tau;
    }
    r
}

impl Graph for FourierSeries<f64> {
    fn eval(&self, x: f64) -> [f64; 3] {
        self.eval3(x)
    }
}

/// Trigonometric interpolant of a grid line.
pub fn spectral_graph(grid: &Grid<f64>, h: &Array1<f64>) -> FourierSeries<f64> {
    grid.fourier_series(h)
}

/// A graph given by closed-form functions.
#[derive(Clone, Copy)]
pub struct FnGraph<F: Fn(f64) -> [f64; 3] + Sync>(pub F);

impl<F: Fn(f64) -> [f64; 3] + Sync> Graph for FnGraph<F> {
    fn eval(&self, x: f64) -> [f64; 3] {
        (self.0)(x)
    }
}

/// `a cos(k x)`.
pub fn cosine(a: f64, k: f64) -> FnGraph<impl Fn(f64) -> [f64; 3] + Sync + Copy> {
    FnGraph(move |x: f64| [a * (k * x).cos(), -a * k * (k * x).sin(), -a * k * k * (k * x).cos()])
}
