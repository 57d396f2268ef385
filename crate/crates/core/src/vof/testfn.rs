//! Compactly supported test functions with closed-form derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::wrap;

/// `(1 - r^2)^3` on `|r| < 1` with two derivatives.
pub fn bump1(r: f64) -> [f64; 3] {
    if r.abs() >= 1.0 {
        return [0.0; 3];
    }
    let q = 1.0 - r * r;
    [q * q * q, -6.0 * r * q * q, -6.0 * q * q + 24.0 * r * r * q]
}

/// Scalar tensor-product bump centred at `(x0, y0)` with half-widths
/// `(a, b)`, periodic in x.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Bump {
    pub x0: f64,
    pub y0: f64,
    pub a: f64,
    pub b: f64,
}

/// Value, gradient and Hessian `[[xx, xy], [xy, yy]]` at a point.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jet {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Bump {
    pub fn jet(&self, x: f64, y: f64) -> Jet {
        let bx = bump1(wrap(x - self.x0) / self.a);
        let by = bump1((y - self.y0) / self.b);
        let (ia, ib) = (1.0 / self.a, 1.0 / self.b);
        Jet {
            v: bx[0] * by[0],
            dx: bx[1] * ia * by[0],
            dy: bx[0] * by[1] * ib,
            dxx: bx[2] * ia * ia * by[0],
            dxy: bx[1] * ia * by[1] * ib,
            dyy: bx[0] * by[2] * ib * ib,
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.jet(x, y).v
    }

    /// x-interval `[x0 - a, x0 + a]` containing the support.
    pub fn x_range(&self) -> (f64, f64) {
        (self.x0 - self.a, self.x0 + self.a)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y0 - self.b, self.y0 + self.b)
    }
}

/// Vector test field `phi = (c1, c2) B`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct VectorBump {
    pub bump: Bump,
    pub c: [f64; 2],
}

/// `D phi` (entry `[i][j] = d_j phi_i`), its y-derivative, `phi` itself and
/// `div phi`, `d_y div phi`.
#[derive(Clone, Copy, Debug, Default)]
pub struct VectorJet {
    pub phi: [f64; 2],
    pub d: [[f64; 2]; 2],
    pub d_y: [[f64; 2]; 2],
    pub div: f64,
    pub div_y: f64,
}

impl VectorBump {
    pub fn jet(&self, x: f64, y: f64) -> VectorJet {
        let j = self.bump.jet(x, y);
        let [c1, c2] = self.c;
        VectorJet {
            phi: [c1 * j.v, c2 * j.v],
            d: [[c1 * j.dx, c1 * j.dy], [c2 * j.dx, c2 * j.dy]],
            d_y: [[c1 * j.dxy, c1 * j.dyy], [c2 * j.dxy, c2 * j.dyy]],
            div: c1 * j.dx + c2 * j.dy,
            div_y: c1 * j.dxy + c2 * j.dyy,
        }
    }

    /// `div phi` and its gradient, for pairing identities.
    pub fn div_jet(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let j = self.bump.jet(x, y);
        let [c1, c2] = self.c;
        (c1 * j.dx + c2 * j.dy, c1 * j.dxx + c2 * j.dxy, c1 * j.dxy + c2 * j.dyy)
    }
}

impl VectorJet {
    /// `M = D phi - div(phi) I`.
    pub fn m(&self) -> [[f64; 2]; 2] {
        [[self.d[0][0] - self.div, self.d[0][1]], [self.d[1][0], self.d[1][1] - self.div]]
    }

    pub fn m_y(&self) -> [[f64; 2]; 2] {
        [[self.d_y[0][0] - self.div_y, self.d_y[0][1]], [self.d_y[1][0], self.d_y[1][1] - self.div_y]]
    }
}

/// `a^T M b`.
pub fn bilinear(a: [f64; 2], m: [[f64; 2]; 2], b: [f64; 2]) -> f64 {
    a[0] * (m[0][0] * b[0] + m[0][1] * b[1]) + a[1] * (m[1][0] * b[0] + m[1][1] * b[1])
}

/// Time factor `(1 - r^2)^3`, `r = (t - tc) / half`; compact in `(tc - half, tc + half)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TimeBump {
    pub tc: f64,
    pub half: f64,
}

impl TimeBump {
    /// Bump filling the open interval `(0, t0)`.
    pub fn on(t0: f64) -> Self {
        Self { tc: 0.5 * t0, half: 0.5 * t0 }
    }

    /// `(tau, tau')`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let b = bump1((t - self.tc) / self.half);
        (b[0], b[1] / self.half)
    }
}

/// Seeded vector bumps straddling the interface region.
///
/// Centres lie in `x0 in [0, 2pi)`, `|y0| <= y_spread`; half-widths in
/// `[0.5, 1.2]` (x) and `[0.3, 0.8]` (y); coefficients in `[-1, 1]`.
pub fn seeded_suite(seed: u64, n: usize, y_spread: f64) -> Vec<VectorBump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| VectorBump {
            bump: Bump {
                x0: rng.random_range(0.0..std::f64::consts::TAU),
                y0: rng.random_range(-y_spread..=y_spread),
                a: rng.random_range(0.5..1.2),
                b: rng.random_range(0.3..0.8),
            },
            c: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_finite_differences() {
        let b = Bump { x0: 6.0, y0: 0.1, a: 0.9, b: 0.5 };
        let (x, y, h) = (0.2, 0.25, 1e-5);
        let j = b.jet(x, y);
        let fx = (b.value(x + h, y) - b.value(x - h, y)) / (2.0 * h);
        let fy = (b.value(x, y + h) - b.value(x, y - h)) / (2.0 * h);
        assert!((fx - j.dx).abs() < 1e-8 && (fy - j.dy).abs() < 1e-8);
        let fxy = (b.jet(x, y + h).dx - b.jet(x, y - h).dx) / (2.0 * h);
        let fyy = (b.jet(x, y + h).dy - b.jet(x, y - h).dy) / (2.0 * h);
        let fxx = (b.jet(x + h, y).dx - b.jet(x - h, y).dx) / (2.0 * h);
        assert!((fxy - j.dxy).abs() < 1e-7 && (fyy - j.dyy).abs() < 1e-7 && (fxx - j.dxx).abs() < 1e-7);
        assert_eq!(b.value(2.0, 0.0), 0.0);
        let s1 = seeded_suite(4, 3, 0.2);
        assert_eq!(s1, seeded_suite(4, 3, 0.2));
    }
}
