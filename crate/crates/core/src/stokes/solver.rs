use ndarray::{Array1, Array2};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, PhysicalParams, ScalarField2D, Side, VectorField2D};
use crate::scalar::{lit, Real};
use crate::state::{FlatState, RhsTuple, Trajectory};

use super::band::{BandLu, BandMatrix};

type C<T> = Complex<T>;

fn c<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Unknown layout of one Fourier mode: velocities at the nodes of each side,
/// pressure at the `ny - 1` cell centres of each side, and `h`.
#[derive(Clone, Copy, Debug)]
pub struct ModeLayout {
    pub ny: usize,
}

impl ModeLayout {
    pub fn size(&self) -> usize {
        6 * self.ny - 1
    }
    fn off(&self, side: Side) -> usize {
        match side {
            Side::Lower => 0,
            Side::Upper => 3 * self.ny,
        }
    }
    pub fn v(&self, side: Side, j: usize) -> usize {
        self.off(side) + 3 * j
    }
    pub fn w(&self, side: Side, j: usize) -> usize {
        self.off(side) + 3 * j + 1
    }
    /// Cell `c` spans nodes `c` and `c + 1`.
    pub fn p(&self, side: Side, cell: usize) -> usize {
        self.off(side) + 3 * cell + 2
    }
    pub fn h(&self) -> usize {
        3 * self.ny - 1
    }
}

const KL: usize = 9;
const KU: usize = 6;

/// Implicit-Euler solver for the linear two-phase Stokes problem with a
/// free interface, one banded system per Fourier mode.
///
/// Each mode is factored once at construction; every time step is then a
/// set of independent back-substitutions.
#[derive(Clone, Debug)]
pub struct StokesSolver<T: Real> {
    grid: Grid<T>,
    params: PhysicalParams<T>,
    layout: ModeLayout,
    factors: Vec<BandLu<T>>,
}

/// Per-step maxima of the imposed interface rows.
#[derive(Clone, Debug, Default)]
pub struct InterfaceResiduals {
    /// Relative residuals per time step: `(tangential, normal, velocity jump)`.
    pub per_step: Vec<(f64, f64, f64)>,
}

impl InterfaceResiduals {
    pub fn max(&self) -> f64 {
        self.per_step.iter().fold(0.0f64, |m, r| m.max(r.0).max(r.1).max(r.2))
    }
}

impl<T: Real> StokesSolver<T> {
    pub fn new(grid: &Grid<T>, params: &PhysicalParams<T>) -> Result<Self> {
        params.validate()?;
        let layout = ModeLayout { ny: grid.ny() };
        let mut solver = Self { grid: grid.clone(), params: params.clone(), layout, factors: Vec::new() };
        let factors: Result<Vec<_>> = (0..grid.nyquist())
            .into_par_iter()
            .map(|m| {
                solver.mode_matrix(m).factor().map_err(|(_, pivot)| Error::SingularMode { mode: m, step: 0, pivot: pivot.as_f64() })
            })
            .collect();
        solver.factors = factors?;
        Ok(solver)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams<T> {
        &self.params
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    /// The per-mode system matrix for FFT bin `m < nx / 2`.
    pub fn mode_matrix(&self, m: usize) -> BandMatrix<T> {
        let l = self.layout;
        let n = l.ny;
        let dy = self.grid.dy();
        let dt = self.grid.spec.dt;
        let k = self.grid.wavenumber(m);
        let ik = Complex::new(T::zero(), k);
        let half = lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let mut a = BandMatrix::zeros(l.size(), KL, KU);
        let (mu1, mu2) = (self.params.mu1, self.params.mu2);

        for side in Side::BOTH {
            let rho = self.params.rho(side);
            let mu = self.params.mu(side);
            let diag = c(rho / dt + mu * (two / (dy * dy) + k * k));
            let off = c(-mu / (dy * dy));
            for j in 1..n - 1 {
                let (rv, rw) = (l.v(side, j), l.w(side, j));
                a.add(rv, rv, diag);
                a.add(rv, l.v(side, j - 1), off);
                a.add(rv, l.v(side, j + 1), off);
                a.add(rv, l.p(side, j - 1), ik * half);
                a.add(rv, l.p(side, j), ik * half);
                a.add(rw, rw, diag);
                a.add(rw, l.w(side, j - 1), off);
                a.add(rw, l.w(side, j + 1), off);
                a.add(rw, l.p(side, j - 1), c(-T::one() / dy));
                a.add(rw, l.p(side, j), c(T::one() / dy));
            }
            for cell in 0..n - 1 {
                let r = l.p(side, cell);
                a.add(r, l.v(side, cell), ik * half);
                a.add(r, l.v(side, cell + 1), ik * half);
                a.add(r, l.w(side, cell), c(-T::one() / dy));
                a.add(r, l.w(side, cell + 1), c(T::one() / dy));
            }
        }
        // far field
        let top = n - 1;
        for (side, j) in [(Side::Lower, 0), (Side::Upper, top)] {
            a.add(l.v(side, j), l.v(side, j), c(T::one()));
            if m == 0 && side == Side::Upper {
                // the k = 0 pressure level is otherwise free; pin the last cell
                a.add(l.w(side, j), l.p(side, n - 2), c(T::one()));
            } else {
                a.add(l.w(side, j), l.w(side, j), c(T::one()));
            }
        }
        // continuity of velocity
        let (lo, up) = (Side::Lower, Side::Upper);
        a.add(l.v(lo, top), l.v(up, 0), c(T::one()));
        a.add(l.v(lo, top), l.v(lo, top), c(-T::one()));
        a.add(l.w(lo, top), l.w(up, 0), c(T::one()));
        a.add(l.w(lo, top), l.w(lo, top), c(-T::one()));
        // one-sided second-order y-derivatives at the interface
        let s = T::one() / (two * dy);
        let dplus = [lit::<T>(-3.0) * s, lit::<T>(4.0) * s, -s];
        let dminus = [lit::<T>(3.0) * s, lit::<T>(-4.0) * s, s];
        // tangential stress: -(mu2 D+ v - mu1 D- v) - ik (mu2 - mu1) w = g_v
        let rt = l.v(up, 0);
        for q in 0..3 {
            a.add(rt, l.v(up, q), c(-mu2 * dplus[q]));
            a.add(rt, l.v(lo, top - q), c(mu1 * dminus[q]));
        }
        a.add(rt, l.w(up, 0), -ik * c(mu2 - mu1));
        // normal stress: -2 (mu2 D+ w - mu1 D- w) + [p] + sigma k^2 h = g_w
        let rn = l.w(up, 0);
        for q in 0..3 {
            a.add(rn, l.w(up, q), c(-two * mu2 * dplus[q]));
            a.add(rn, l.w(lo, top - q), c(two * mu1 * dminus[q]));
        }
        let (e0, e1) = (lit::<T>(1.5), lit::<T>(-0.5));
        a.add(rn, l.p(up, 0), c(e0));
        a.add(rn, l.p(up, 1), c(e1));
        a.add(rn, l.p(lo, n - 2), c(-e0));
        a.add(rn, l.p(lo, n - 3), c(-e1));
        a.add(rn, l.h(), c(self.params.sigma * k * k));
        // kinematic condition
        a.add(l.h(), l.h(), c(T::one()));
        a.add(l.h(), l.w(up, 0), c(-dt));
        a
    }

    /// Right-hand side of mode `m` for one step.
    fn mode_rhs(&self, m: usize, data: &StepSpectra<T>) -> Vec<C<T>> {
        let l = self.layout;
        let n = l.ny;
        let dt = self.grid.spec.dt;
        let half = lit::<T>(0.5);
        let mut b = vec![c(T::zero()); l.size()];
        for (si, side) in Side::BOTH.into_iter().enumerate() {
            let rho = self.params.rho(side);
            for j in 1..n - 1 {
                b[l.v(side, j)] = data.fv[si][(m, j)] + data.v_old[si][(m, j)] * c(rho / dt);
                b[l.w(side, j)] = data.fw[si][(m, j)] + data.w_old[si][(m, j)] * c(rho / dt);
            }
            for cell in 0..n - 1 {
                b[l.p(side, cell)] = (data.fd[si][(m, cell)] + data.fd[si][(m, cell + 1)]) * c(half);
            }
        }
        b[l.v(Side::Upper, 0)] = data.gv[m];
        b[l.w(Side::Upper, 0)] = data.gw[m];
        b[l.h()] = data.h_old[m] + data.gh_old[m] * c(dt);
        b
    }

    /// Solves one mode system for an arbitrary right-hand side.
    pub fn solve_mode(&self, m: usize, b: &mut [C<T>]) {
        self.factors[m].solve_in_place(b);
    }

    /// Advances `prev` by one step with data `rhs` at the new level and
    /// `gh_prev = g_h` at the old level.
    pub fn step(&self, prev: &FlatState<T>, rhs: &RhsTuple<T>, gh_prev: &Array1<T>) -> FlatState<T> {
        let data = StepSpectra::new(&self.grid, prev, rhs, gh_prev);
        let sols: Vec<Vec<C<T>>> = (0..self.grid.nyquist())
            .into_par_iter()
            .map(|m| {
                let mut b = self.mode_rhs(m, &data);
                self.solve_mode(m, &mut b);
                b
            })
            .collect();
        self.synthesize(&sols)
    }

    /// Converts per-mode solution vectors to a nodal state.
    pub fn synthesize(&self, sols: &[Vec<C<T>>]) -> FlatState<T> {
        let l = self.layout;
        let n = l.ny;
        let nh = self.grid.nyquist();
        let zero = c(T::zero());
        let mut v = [Array2::from_elem((nh, n), zero), Array2::from_elem((nh, n), zero)];
        let mut w = v.clone();
        let mut p = v.clone();
        let mut h = vec![zero; nh];
        let (e0, e1, half) = (lit::<T>(1.5), lit::<T>(-0.5), lit::<T>(0.5));
        for (m, x) in sols.iter().enumerate() {
            for (si, side) in Side::BOTH.into_iter().enumerate() {
                for j in 0..n {
                    v[si][(m, j)] = x[l.v(side, j)];
                    w[si][(m, j)] = x[l.w(side, j)];
                }
                let cell = |q: usize| x[l.p(side, q)];
                p[si][(m, 0)] = cell(0) * c(e0) + cell(1) * c(e1);
                p[si][(m, n - 1)] = cell(n - 2) * c(e0) + cell(n - 3) * c(e1);
                for j in 1..n - 1 {
                    p[si][(m, j)] = (cell(j - 1) + cell(j)) * c(half);
                }
            }
            h[m] = x[l.h()];
        }
        let g = &self.grid;
        let field = |a: &[Array2<C<T>>; 2]| ScalarField2D { lower: synth_side(g, &a[0]), upper: synth_side(g, &a[1]) };
        let mut pi = field(&p);
        // gauge: mean over the two far-field pressure rows is zero
        let nx = g.nx();
        let mean = (0..nx).map(|i| pi.lower[(i, 0)] + pi.upper[(i, n - 1)]).sum::<T>() / (lit::<T>(2.0) * T::of(nx));
        pi = pi.map(|q| q - mean);
        let r = &pi.interface_trace(Side::Upper) - &pi.interface_trace(Side::Lower);
        FlatState { u: VectorField2D { x: field(&v), y: field(&w) }, pi, r, h: Array1::from(synth_line(g, &h)) }
    }

    /// Pressure at level 0, which the time march does not determine: zero
    /// below, and above the jump that makes the normal-stress row hold.
    pub fn initial_pressure(&self, u0: &VectorField2D<T>, h0: &Array1<T>, gw0: &Array1<T>) -> (ScalarField2D<T>, Array1<T>) {
        let wy = self.grid.dy1(&u0.y);
        let n = self.grid.ny();
        let q = self.grid.dx1(h0, 2);
        let two = lit::<T>(2.0);
        let r = Array1::from_shape_fn(self.grid.nx(), |i| {
            gw0[i] + two * (self.params.mu2 * wy.upper[(i, 0)] - self.params.mu1 * wy.lower[(i, n - 1)]) + self.params.sigma * q[i]
        });
        let mut pi = ScalarField2D::zeros(self.grid.nx(), n);
        pi.upper = Array2::from_shape_fn((self.grid.nx(), n), |(i, _)| r[i]);
        (pi, r)
    }

    /// Marches `(u0, h0)` through the data `rhs[0..=M]`.
    pub fn solve(&self, rhs: &[RhsTuple<T>], u0: &VectorField2D<T>, h0: &Array1<T>) -> Result<Trajectory<T>> {
        if rhs.is_empty() {
            return Err(Error::Shape("empty right-hand side trajectory".into()));
        }
        if u0.x.nx() != self.grid.nx() || u0.x.ny() != self.grid.ny() || h0.len() != self.grid.nx() {
            return Err(Error::Shape("initial data do not match the grid".into()));
        }
        self.warn_incompatible(&rhs[0], u0);
        let (pi0, r0) = self.initial_pressure(u0, h0, &rhs[0].gw);
        let mut out = Vec::with_capacity(rhs.len());
        out.push(FlatState { u: u0.clone(), pi: pi0, r: r0, h: h0.clone() });
        for m in 1..rhs.len() {
            let next = self.step(&out[m - 1], &rhs[m], &rhs[m - 1].gh);
            if !next.is_finite() {
                return Err(Error::NonFinite("Stokes step"));
            }
            out.push(next);
        }
        Ok(out)
    }

    fn warn_incompatible(&self, rhs0: &RhsTuple<T>, u0: &VectorField2D<T>) {
        let g = &self.grid;
        let div = g.dx2d(&u0.x, 1).axpy(T::one(), &g.dy1(&u0.y));
        let scale = T::one() + div.max_abs().max(rhs0.fd.max_abs());
        let rd = div.axpy(-T::one(), &rhs0.fd).max_abs() / scale;
        let tang = self.tangential_row(&u0.x, &u0.y);
        let scale_t = T::one() + tang.iter().chain(rhs0.gv.iter()).fold(T::zero(), |m, v| m.max(v.abs()));
        let rt = (&tang - &rhs0.gv).iter().fold(T::zero(), |m, v| m.max(v.abs())) / scale_t;
        let tol = lit::<T>(1e-6);
        if rd > tol || rt > tol {
            log::warn!("initial data violate compatibility: divergence {rd:e}, tangential stress {rt:e} (relative)");
        }
    }

    /// `-[mu d_y v] - [mu d_x w]` with the solver's one-sided stencils.
    fn tangential_row(&self, v: &ScalarField2D<T>, w: &ScalarField2D<T>) -> Array1<T> {
        let (dp, dm) = one_sided(&self.grid, v);
        let wx = self.grid.dx1(&w.interface_trace(Side::Upper), 1);
        let (mu1, mu2) = (self.params.mu1, self.params.mu2);
        Array1::from_shape_fn(self.grid.nx(), |i| -(mu2 * dp[i] - mu1 * dm[i]) - (mu2 - mu1) * wx[i])
    }

    /// Residuals of the interface rows along a computed trajectory.
    pub fn interface_residuals(&self, z: &[FlatState<T>], rhs: &[RhsTuple<T>]) -> InterfaceResiduals {
        let g = &self.grid;
        let (mu1, mu2, sigma) = (self.params.mu1, self.params.mu2, self.params.sigma);
        let two = lit::<T>(2.0);
        let mut out = InterfaceResiduals::default();
        let lmax = |a: &Array1<T>| a.iter().fold(T::zero(), |m, v| m.max(v.abs())).as_f64();
        for m in 1..z.len() {
            let s = &z[m];
            let tang = self.tangential_row(&s.u.x, &s.u.y);
            let (dp, dm) = one_sided(g, &s.u.y);
            let q = g.dx1(&s.h, 2);
            let visc = Array1::from_shape_fn(g.nx(), |i| -two * (mu2 * dp[i] - mu1 * dm[i]));
            let cap = &q * (-sigma);
            let normal = &(&visc + &s.r) + &cap;
            let rt = lmax(&(&tang - &rhs[m].gv)) / (lmax(&tang).max(lmax(&rhs[m].gv)).max(f64::MIN_POSITIVE));
            let scale_n = lmax(&visc).max(lmax(&s.r)).max(lmax(&cap)).max(lmax(&rhs[m].gw)).max(f64::MIN_POSITIVE);
            let rn = lmax(&(&normal - &rhs[m].gw)) / scale_n;
            let mut rj = 0.0f64;
            let mut scale_j = f64::MIN_POSITIVE;
            for f in [&s.u.x, &s.u.y] {
                let (lo, up) = (f.interface_trace(Side::Lower), f.interface_trace(Side::Upper));
                rj = rj.max(lmax(&(&up - &lo)));
                scale_j = scale_j.max(lmax(&up));
            }
            out.per_step.push((rt, rn, rj / scale_j));
        }
        out
    }
}

/// One-sided second-order `d_y` at the interface: `(upper, lower)`.
pub(crate) fn one_sided<T: Real>(grid: &Grid<T>, f: &ScalarField2D<T>) -> (Array1<T>, Array1<T>) {
    let n = grid.ny();
    let s = T::one() / (lit::<T>(2.0) * grid.dy());
    let (three, four) = (lit::<T>(3.0), lit::<T>(4.0));
    let up = Array1::from_shape_fn(grid.nx(), |i| (-three * f.upper[(i, 0)] + four * f.upper[(i, 1)] - f.upper[(i, 2)]) * s);
    let lo = Array1::from_shape_fn(grid.nx(), |i| {
        (three * f.lower[(i, n - 1)] - four * f.lower[(i, n - 2)] + f.lower[(i, n - 3)]) * s
    });
    (up, lo)
}

/// Half spectrum (bins `0..nx/2`) of every y-row of one side.
pub(crate) fn spectra_side<T: Real>(grid: &Grid<T>, a: &Array2<T>) -> Array2<C<T>> {
    let nh = grid.nyquist();
    let mut out = Array2::from_elem((nh, a.ncols()), c(T::zero()));
    for j in 0..a.ncols() {
        let col = a.column(j).to_vec();
        let s = grid.forward(&col);
        for m in 0..nh {
            out[(m, j)] = s[m];
        }
    }
    out
}

pub(crate) fn spectra_line<T: Real>(grid: &Grid<T>, a: &Array1<T>) -> Vec<C<T>> {
    let mut s = grid.forward(&a.to_vec());
    s.truncate(grid.nyquist());
    s
}

/// Real line from half spectrum; the Nyquist bin is zero.
pub(crate) fn synth_line<T: Real>(grid: &Grid<T>, s: &[C<T>]) -> Vec<T> {
    let nx = grid.nx();
    let mut full = vec![c(T::zero()); nx];
    full[0] = c(s[0].re);
    for m in 1..grid.nyquist() {
        full[m] = s[m];
        full[nx - m] = s[m].conj();
    }
    grid.inverse(full)
}

pub(crate) fn synth_side<T: Real>(grid: &Grid<T>, s: &Array2<C<T>>) -> Array2<T> {
    let mut out = Array2::zeros((grid.nx(), s.ncols()));
    for j in 0..s.ncols() {
        let col: Vec<C<T>> = s.column(j).to_vec();
        let line = synth_line(grid, &col);
        for (i, v) in line.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

struct StepSpectra<T> {
    fv: [Array2<C<T>>; 2],
    fw: [Array2<C<T>>; 2],
    fd: [Array2<C<T>>; 2],
    v_old: [Array2<C<T>>; 2],
    w_old: [Array2<C<T>>; 2],
    gv: Vec<C<T>>,
    gw: Vec<C<T>>,
    gh_old: Vec<C<T>>,
    h_old: Vec<C<T>>,
}

impl<T: Real> StepSpectra<T> {
    fn new(grid: &Grid<T>, prev: &FlatState<T>, rhs: &RhsTuple<T>, gh_prev: &Array1<T>) -> Self {
        let both = |f: &ScalarField2D<T>| [spectra_side(grid, &f.lower), spectra_side(grid, &f.upper)];
        Self {
            fv: both(&rhs.f.x),
            fw: both(&rhs.f.y),
            fd: both(&rhs.fd),
            v_old: both(&prev.u.x),
            w_old: both(&prev.u.y),
            gv: spectra_line(grid, &rhs.gv),
            gw: spectra_line(grid, &rhs.gw),
            gh_old: spectra_line(grid, gh_prev),
            h_old: spectra_line(grid, &prev.h),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(nx: usize, ny: usize) -> StokesSolver<f64> {
        let grid = Grid::new(GridSpec::new(nx, ny, 2.0, 0.02, 0.1)).unwrap();
        let params = PhysicalParams { rho1: 1.0, rho2: 0.8, mu1: 1.0, mu2: 0.5, sigma: 1.0 };
        StokesSolver::new(&grid, &params).unwrap()
    }

    fn smooth_rhs(grid: &Grid<f64>, seed: u64) -> Vec<RhsTuple<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        (0..=grid.spec.n_steps())
            .map(|m| {
                let t = grid.spec.dt * m as f64;
                let mut r = RhsTuple::zeros(grid);
                r.f.x = ScalarField2D::from_fn(grid, |x, y, _| a[0] * (x + t).sin() * (4.0 - y * y));
                r.f.y = ScalarField2D::from_fn(grid, |x, y, _| a[1] * (2.0 * x).cos() * (1.0 + y));
                r.fd = ScalarField2D::from_fn(grid, |x, y, _| a[2] * x.cos() * (0.5 * y).cos());
                r.gv = Array1::from_shape_fn(grid.nx(), |i| a[3] * (grid.x(i) - t).cos());
                r.gw = Array1::from_shape_fn(grid.nx(), |i| a[4] * (2.0 * grid.x(i)).sin());
                r.gh = Array1::from_shape_fn(grid.nx(), |i| a[5] * grid.x(i).cos() * t);
                r
            })
            .collect()
    }

    #[test]
    fn zero_data_gives_zero() {
        let s = setup(16, 9);
        let g = s.grid().clone();
        let rhs = vec![RhsTuple::zeros(&g); g.spec.n_steps() + 1];
        let z = s.solve(&rhs, &VectorField2D::zeros(16, 9), &Array1::zeros(16)).unwrap();
        assert!(z.iter().all(|st| st.max_abs() == 0.0));
    }

    #[test]
    fn mode_systems_reproduce_manufactured_vectors() {
        let s = setup(16, 33);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [0usize, 1, 5, 7] {
            let a = s.mode_matrix(m);
            let l = s.layout();
            let x: Vec<C<f64>> = (0..l.size())
                .map(|i| {
                    let y = i as f64 / l.size() as f64;
                    Complex::new((3.0 * y).sin() + 0.1 * rng.random_range(-1.0..1.0), y * y)
                })
                .collect();
            let mut b = a.mul_vec(&x);
            s.solve_mode(m, &mut b);
            let err = x.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            let scale = x.iter().map(|p| p.norm()).fold(0.0, f64::max);
            assert!(err / scale < 1e-10, "mode {m}: {err}");
        }
    }

    #[test]
    fn interface_rows_hold_and_r_is_pressure_jump() {
        let s = setup(32, 17);
        let g = s.grid().clone();
        let rhs = smooth_rhs(&g, 1);
        let z = s.solve(&rhs, &VectorField2D::zeros(32, 17), &Array1::zeros(32)).unwrap();
        let res = s.interface_residuals(&z, &rhs);
        assert!(res.max() < 1e-10, "{}", res.max());
        for st in &z {
            let jump = crate::grid::trace_jump(&st.pi).jump;
            assert!((&jump - &st.r).iter().all(|d| d.abs() < 1e-12));
        }
    }

    #[test]
    fn shift_equivariance() {
        let s = setup(32, 17);
        let g = s.grid().clone();
        let rhs = smooth_rhs(&g, 2);
        let roll2 = |a: &Array2<f64>| Array2::from_shape_fn(a.dim(), |(i, j)| a[((i + 31) % 32, j)]);
        let roll = |f: &ScalarField2D<f64>| ScalarField2D { lower: roll2(&f.lower), upper: roll2(&f.upper) };
        let roll1 = |a: &Array1<f64>| Array1::from_shape_fn(32, |i| a[(i + 31) % 32]);
        let shifted: Vec<RhsTuple<f64>> = rhs
            .iter()
            .map(|r| RhsTuple {
                f: VectorField2D { x: roll(&r.f.x), y: roll(&r.f.y) },
                fd: roll(&r.fd),
                gv: roll1(&r.gv),
                gw: roll1(&r.gw),
                gh: roll1(&r.gh),
            })
            .collect();
        let u0 = VectorField2D::zeros(32, 17);
        let h0 = Array1::from_shape_fn(32, |i| 0.01 * (g.x(i)).cos());
        let a = s.solve(&rhs, &u0, &h0).unwrap();
        let b = s.solve(&shifted, &u0, &roll1(&h0)).unwrap();
        for (p, q) in a.iter().zip(&b) {
            let d = roll(&p.u.x).axpy(-1.0, &q.u.x).max_abs() + roll(&p.pi).axpy(-1.0, &q.pi).max_abs();
            let dh = (&roll1(&p.h) - &q.h).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(d + dh < 1e-11, "{d} {dh}");
        }
    }

    #[test]
    fn heat_smooth_multiplier() {
        let s = setup(32, 9);
        let g = s.grid();
        let f = Array1::from_shape_fn(32, |i| 1.0 + (3.0 * g.x(i)).cos());
        let out = super::super::heat_smooth(g, &f, 0.2).unwrap();
        for i in 0..32 {
            let e = 1.0 + (-1.8f64).exp() * (3.0 * g.x(i)).cos();
            assert!((out[i] - e).abs() < 1e-12);
        }
        assert!(super::super::heat_smooth(g, &f, -1.0).is_err());
    }
}
