use crate::scalar::{lit, Real};

/// Gauss-Legendre rule on `[-1, 1]`, nodes found by Newton iteration on the
/// three-term recurrence.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes: nodes.into_iter().map(lit).collect(), weights: weights.into_iter().map(lit).collect() }
    }

    /// Integrate `f` over `[a, b]` split into `panels` equal pieces.
    pub fn composite(&self, a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
        let h = (b - a) / T::of(panels);
        let half = lit::<T>(0.5) * h;
        let mut s = T::zero();
        for p in 0..panels {
            let mid = a + h * (T::of(p) + lit(0.5));
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += *w * f(mid + half * *x);
            }
        }
        s * half
    }

    /// Mapped nodes and weights of the composite rule, for reuse in loops.
    pub fn composite_points(&self, a: T, b: T, panels: usize) -> Vec<(T, T)> {
        let h = (b - a) / T::of(panels);
        let half = lit::<T>(0.5) * h;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let mid = a + h * (T::of(p) + lit(0.5));
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + half * *x, *w * half));
            }
        }
        out
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 { 0.0 } else { n as f64 * (x * p1 - p0) / (x * x - 1.0) };
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_high_degree() {
        let gl = GaussLegendre::<f64>::new(5);
        let s: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let c = gl.composite(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((c - 2.0).abs() < 1e-10);
    }
}
