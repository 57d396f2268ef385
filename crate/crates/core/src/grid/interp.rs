use ndarray::ArrayView1;

use crate::scalar::Real;

/// Cubic Lagrange weights for the value and first derivative at `x` given
/// four distinct nodes.
pub fn cubic_weights<T: Real>(nodes: [T; 4], x: T) -> ([T; 4], [T; 4]) {
    let mut w = [T::zero(); 4];
    let mut dw = [T::zero(); 4];
    for a in 0..4 {
        let mut den = T::one();
        for b in 0..4 {
            if b != a {
                den *= nodes[a] - nodes[b];
            }
        }
        let mut num = T::one();
        let mut dnum = T::zero();
        for b in 0..4 {
            if b == a {
                continue;
            }
            let d = x - nodes[b];
            dnum = dnum * d + num;
            num *= d;
        }
        w[a] = num / den;
        dw[a] = dnum / den;
    }
    (w, dw)
}

/// Equispaced weights at fractional offset `t` in units of the spacing, for
/// nodes `-1, 0, 1, 2`.
fn unit_weights<T: Real>(t: T) -> ([T; 4], [T; 4]) {
    let one = T::one();
    cubic_weights([-one, T::zero(), one, one + one], t)
}

/// Cubic interpolation of a periodic line sampled at `x_i = i * dx`.
/// Returns value and x-derivative.
pub fn periodic_cubic<T: Real>(line: ArrayView1<T>, dx: T, x: T) -> (T, T) {
    let n = line.len();
    let period = dx * T::of(n);
    let xr = x - (x / period).floor() * period;
    let s = xr / dx;
    let i0 = s.floor();
    let t = s - i0;
    let i0 = i0.to_usize().unwrap_or(0) % n;
    let (w, dw) = unit_weights(t);
    let mut v = T::zero();
    let mut d = T::zero();
    for a in 0..4 {
        let idx = (i0 + n + a - 1) % n;
        v += w[a] * line[idx];
        d += dw[a] * line[idx];
    }
    (v, d / dx)
}

/// Cubic interpolation along a single y column `f_j` at `y_j = y0 + j dy`.
///
/// Stencils become one-sided near the column ends so the interface value is
/// extrapolated from one side only. Queries outside `[y0, y0 + (n-1) dy]` by
/// more than `reach` spacings are clipped to the end value.
#[derive(Clone, Copy, Debug)]
pub struct ColumnInterp<T> {
    pub y0: T,
    pub dy: T,
    pub n: usize,
    pub reach: T,
}

/// Result of a column lookup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColumnSample<T> {
    pub value: T,
    pub deriv: T,
    pub clipped: bool,
}

impl<T: Real> ColumnInterp<T> {
    pub fn new(y0: T, dy: T, n: usize) -> Self {
        debug_assert!(n >= 4);
        Self { y0, dy, n, reach: T::one() }
    }

    /// Stencil start and weights for a query at `y`.
    pub fn weights(&self, y: T) -> (usize, [T; 4], [T; 4], bool) {
        let top = T::of(self.n - 1);
        let mut s = (y - self.y0) / self.dy;
        let mut clipped = false;
        if s < -self.reach {
            s = T::zero();
            clipped = true;
        } else if s > top + self.reach {
            s = top;
            clipped = true;
        }
        let base = s.floor().max(T::one()).min(T::of(self.n - 3)) - T::one();
        let start = base.to_usize().unwrap_or(0);
        let t = s - base - T::one();
        let (w, mut dw) = unit_weights(t);
        if clipped {
            dw = [T::zero(); 4];
        }
        for d in dw.iter_mut() {
            *d /= self.dy;
        }
        (start, w, dw, clipped)
    }

    pub fn sample(&self, col: ArrayView1<T>, y: T) -> ColumnSample<T> {
        let (start, w, dw, clipped) = self.weights(y);
        let mut value = T::zero();
        let mut deriv = T::zero();
        for a in 0..4 {
            value += w[a] * col[start + a];
            deriv += dw[a] * col[start + a];
        }
        ColumnSample { value, deriv, clipped }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let nodes = [0.0, 0.3, 1.1, 2.0];
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x + x * x * x;
        let df = |x: f64| -2.0 + x + 3.0 * x * x;
        let (w, dw) = cubic_weights(nodes, 0.77);
        let v: f64 = (0..4).map(|a| w[a] * f(nodes[a])).sum();
        let d: f64 = (0..4).map(|a| dw[a] * f(nodes[a])).sum();
        assert!((v - f(0.77)).abs() < 1e-13);
        assert!((d - df(0.77)).abs() < 1e-12);
    }

    #[test]
    fn column_extrapolates_quadratic_past_end() {
        let ci = ColumnInterp::new(-1.0, 0.1, 11);
        let col = Array1::from_shape_fn(11, |j| {
            let y = -1.0 + 0.1 * j as f64;
            y * y + 2.0 * y
        });
        let s = ci.sample(col.view(), 0.05);
        assert!(!s.clipped);
        assert!((s.value - (0.0025 + 0.1)).abs() < 1e-12);
        assert!((s.deriv - 2.1).abs() < 1e-11);
        assert!(ci.sample(col.view(), 0.5).clipped);
    }

    #[test]
    fn periodic_cubic_wraps() {
        let n = 64;
        let dx = std::f64::consts::TAU / n as f64;
        let line = Array1::from_shape_fn(n, |i| (i as f64 * dx).sin());
        let (v, d) = periodic_cubic(line.view(), dx, -0.01);
        assert!((v - (-0.01f64).sin()).abs() < 1e-6);
        assert!((d - (-0.01f64).cos()).abs() < 1e-4);
    }
}
