use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Grid, ScalarField2D, Side};

fn ik_power<T: Real>(k: T, order: u32) -> Complex<T> {
    let ik = Complex::new(T::zero(), k);
    (0..order).fold(Complex::new(T::one(), T::zero()), |acc, _| acc * ik)
}

impl<T: Real> Grid<T> {
    /// Applies the Fourier multiplier `m(k)` to a periodic line.
    pub fn apply_multiplier(&self, line: &[T], m: impl Fn(usize, T) -> Complex<T>) -> Vec<T> {
        let mut modes = self.forward(line);
        for (n, c) in modes.iter_mut().enumerate() {
            *c *= m(n, self.wavenumber(n));
        }
        self.inverse(modes)
    }

    /// Spectral x-derivative of `order` without finiteness checks.
    ///
    /// Odd derivatives drop the Nyquist bin.
    pub(crate) fn dx_line(&self, line: &[T], order: u32) -> Vec<T> {
        if order == 0 {
            return line.to_vec();
        }
        let nyq = self.nyquist();
        self.apply_multiplier(line, |n, k| {
            if n == nyq && order % 2 == 1 {
                Complex::new(T::zero(), T::zero())
            } else {
                ik_power(k, order)
            }
        })
    }

    pub(crate) fn dx1(&self, line: &Array1<T>, order: u32) -> Array1<T> {
        Array1::from(self.dx_line(&line.to_vec(), order))
    }

    pub(crate) fn dx_side(&self, a: &Array2<T>, order: u32) -> Array2<T> {
        let mut out = Array2::zeros(a.raw_dim());
        for j in 0..a.ncols() {
            let col: Vec<T> = a.column(j).to_vec();
            let d = self.dx_line(&col, order);
            for (i, v) in d.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub(crate) fn dx2d(&self, f: &ScalarField2D<T>, order: u32) -> ScalarField2D<T> {
        ScalarField2D { lower: self.dx_side(&f.lower, order), upper: self.dx_side(&f.upper, order) }
    }

    /// Spectral derivative of an interface field.
    pub fn ddx_line(&self, line: &Array1<T>, order: u32) -> Result<Array1<T>> {
        if line.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ddx input"));
        }
        Ok(self.dx1(line, order))
    }

    /// Spectral derivative of a two-sided field along x, side by side.
    pub fn ddx(&self, f: &ScalarField2D<T>, order: u32) -> Result<ScalarField2D<T>> {
        if !f.is_finite() {
            return Err(Error::NonFinite("ddx input"));
        }
        Ok(self.dx2d(f, order))
    }

    /// Exact trigonometric interpolant of a periodic line.
    pub fn fourier_series(&self, line: &Array1<T>) -> FourierSeries<T> {
        FourierSeries::new(self, line.as_slice().expect("contiguous"))
    }

    pub fn side_column(&self, f: &ScalarField2D<T>, side: Side, j: usize) -> Array1<T> {
        f.side(side).column(j).to_owned()
    }
}

/// Trigonometric interpolant `f(x) = sum_k c_k e^{ikx}` of nodal data,
/// evaluable with derivatives at arbitrary x.
#[derive(Clone, Debug)]
pub struct FourierSeries<T> {
    base: T,
    /// `c_m` for `m = 1..n/2`; negative modes are conjugates.
    coeffs: Vec<Complex<T>>,
    /// Real Nyquist amplitude (`a cos(k_N x)`).
    nyquist: T,
    mean: T,
}

impl<T: Real> FourierSeries<T> {
    pub fn new(grid: &Grid<T>, line: &[T]) -> Self {
        let n = grid.nx();
        let scale = T::one() / T::of(n);
        let c = grid.forward(line);
        let coeffs = c[1..n / 2].iter().map(|&cm| cm * scale).collect();
        Self { base: grid.wavenumber(1), coeffs, nyquist: c[n / 2].re * scale, mean: c[0].re * scale }
    }

    /// Value (`order = 0`) or derivative of the interpolant at `x`.
    pub fn eval(&self, x: T, order: u32) -> T {
        let two = T::one() + T::one();
        let mut acc = if order == 0 { self.mean } else { T::zero() };
        let e1 = Complex::new((self.base * x).cos(), (self.base * x).sin());
        let mut e = e1;
        for (m, &c) in self.coeffs.iter().enumerate() {
            let k = self.base * T::of(m + 1);
            acc += two * (c * e * ik_power(k, order)).re;
            e *= e1;
        }
        let kn = self.base * T::of(self.coeffs.len() + 1);
        let (s, c) = (kn * x).sin_cos();
        let kp = (0..order).fold(T::one(), |p, _| p * kn);
        let v = match order % 4 {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        };
        acc + self.nyquist * kp * v
    }

    /// Value and first two derivatives.
    pub fn eval3(&self, x: T) -> [T; 3] {
        [self.eval(x, 0), self.eval(x, 1), self.eval(x, 2)]
    }
}
