//! Graph quantities of the interface `y = h(x)`: unit normal, curvature and
//! the curvature correction `G_kappa`.

use ndarray::{Array1, Zip};

use crate::grid::Grid;
use crate::scalar::Real;

/// Pointwise `G_kappa` for slope `g = h'` and second derivative `q = h''`
/// (one horizontal dimension).
#[inline]
pub fn g_kappa_point<T: Real>(g: T, q: T) -> T {
    let s = (T::one() + g * g).sqrt();
    g * g * q / ((T::one() + s) * s) + g * g * q / (s * s * s)
}

/// Partial derivatives `(d/dg, d/dq)` of [`g_kappa_point`].
///
/// In one dimension `G_kappa = q (1 - s^-3)` with `s = sqrt(1 + g^2)`.
#[inline]
pub fn g_kappa_partials<T: Real>(g: T, q: T) -> (T, T) {
    let s2 = T::one() + g * g;
    let s = s2.sqrt();
    let s3 = s2 * s;
    let dq = T::one() - T::one() / s3;
    let dg = T::lit(3.0) * q * g / (s3 * s2);
    (dg, dq)
}

pub fn g_kappa<T: Real>(grid: &Grid<T>, h: &Array1<T>) -> Array1<T> {
    let g = grid.dx1(h, 1);
    let q = grid.dx1(h, 2);
    Zip::from(&g).and(&q).map_collect(|&g, &q| g_kappa_point(g, q))
}

/// Mean curvature `h'' - G_kappa(h)`, negative where the lower phase is
/// convex.
pub fn curvature<T: Real>(grid: &Grid<T>, h: &Array1<T>) -> Array1<T> {
    let g = grid.dx1(h, 1);
    let q = grid.dx1(h, 2);
    Zip::from(&g).and(&q).map_collect(|&g, &q| q - g_kappa_point(g, q))
}

/// Upward unit normal `(-h', 1) / sqrt(1 + h'^2)` as `(x, y)` components.
pub fn unit_normal<T: Real>(grid: &Grid<T>, h: &Array1<T>) -> (Array1<T>, Array1<T>) {
    let g = grid.dx1(h, 1);
    let inv = g.mapv(|g| T::one() / (T::one() + g * g).sqrt());
    let nx = Zip::from(&g).and(&inv).map_collect(|&g, &s| -g * s);
    (nx, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid(nx: usize) -> Grid<f64> {
        Grid::new(GridSpec::new(nx, 8, 1.0, 0.1, 0.1)).unwrap()
    }

    fn divergence_form(grid: &Grid<f64>, h: &Array1<f64>) -> Array1<f64> {
        let g = grid.ddx_line(h, 1).unwrap();
        let flux = g.mapv(|g| g / (1.0 + g * g).sqrt());
        grid.ddx_line(&flux, 1).unwrap()
    }

    #[test]
    fn flat_interface_has_no_correction() {
        let gr = grid(32);
        let h = Array1::zeros(32);
        assert!(g_kappa(&gr, &h).iter().all(|&v| v == 0.0));
        assert!(curvature(&gr, &h).iter().all(|&v| v == 0.0));
        let (nx, ny) = unit_normal(&gr, &h);
        assert!(nx.iter().all(|&v| v == 0.0) && ny.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn curvature_matches_divergence_form() {
        let gr = grid(256);
        for amp in [0.2, 0.5] {
            let h = gr.xs().mapv(|x| amp * x.cos());
            let k = curvature(&gr, &h);
            let d = divergence_form(&gr, &h);
            let err = (&k - &d).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(err < 1e-8, "amp {amp}: {err}");
        }
    }

    #[test]
    fn small_amplitude_curvature_is_linear() {
        let gr = grid(64);
        let a = 1e-3;
        let h = gr.xs().mapv(|x| a * x.cos());
        let k = curvature(&gr, &h);
        for (i, &kv) in k.iter().enumerate() {
            let lin = -a * gr.x(i).cos();
            assert!((kv - lin).abs() <= 1e-4 * a, "{kv} vs {lin}");
        }
    }

    #[test]
    fn normal_is_unit_and_upward() {
        let gr = grid(64);
        let h = gr.xs().mapv(|x| 0.7 * (2.0 * x).sin() + 0.1 * x.cos());
        let (nx, ny) = unit_normal(&gr, &h);
        for (a, b) in nx.iter().zip(&ny) {
            assert!((a * a + b * b - 1.0).abs() < 1e-12);
            assert!(*b > 0.0);
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let (g, q, e) = (0.37f64, -1.3, 1e-6);
        let (dg, dq) = g_kappa_partials(g, q);
        let fg = (g_kappa_point(g + e, q) - g_kappa_point(g - e, q)) / (2.0 * e);
        let fq = (g_kappa_point(g, q + e) - g_kappa_point(g, q - e)) / (2.0 * e);
        assert!((dg - fg).abs() < 1e-8 && (dq - fq).abs() < 1e-8);
    }
}
