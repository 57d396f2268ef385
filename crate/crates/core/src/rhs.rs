//! Nonlinear right-hand sides `N(z) = (F, F_d, G, H)` of the flat-interface
//! problem, their directional derivatives, the initial pressure jump and the
//! initial compatibility conditions.
//!
//! `N` is a sum of tagged product terms ([`TERMS`]). Every term is a constant
//! times a phase coefficient times a product of named [`Factor`]s, so the
//! derivative is the product rule applied factor by factor.

use ndarray::{Array1, Zip};
use rayon::prelude::*;

use crate::geometry::{g_kappa_partials, g_kappa_point};
use crate::grid::{Grid, PhysicalParams, ScalarField2D, Side, VectorField2D};
use crate::scalar::{lit, Real};
use crate::state::{FlatState, RhsTuple};

/// Quantities appearing in the products of `N`.
///
/// Names ending in `x`/`y` are partial derivatives; `J*` are jumps
/// `[mu d* ]` across `y = 0`; `G = h'`, `Q = h''`, `Gk = G_kappa(h)`,
/// `Ht` is `d_t h` taken from the interface equation `w(0) + H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    V,
    W,
    Vx,
    Vy,
    Vxy,
    Vyy,
    Wx,
    Wy,
    Wxy,
    Wyy,
    Py,
    G,
    Q,
    Gk,
    Ht,
    JVx,
    JVy,
    JWx,
    JWy,
    R,
    TrV,
}

const N_FACTORS: usize = 21;

impl Factor {
    pub fn is_line(self) -> bool {
        use Factor::*;
        matches!(self, G | Q | Gk | Ht | JVx | JVy | JWx | JWy | R | TrV)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Fv,
    Fw,
    Fd,
    Gv,
    Gw,
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coef {
    One,
    Mu,
    Rho,
    Sigma,
}

#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub name: &'static str,
    pub target: Component,
    pub coef: Coef,
    pub scale: f64,
    pub factors: &'static [Factor],
}

impl Term {
    /// True if the term carries a second derivative of `v`, `w` or `h`.
    pub fn is_second_order(&self) -> bool {
        use Factor::*;
        self.factors.iter().any(|f| matches!(f, Vxy | Vyy | Wxy | Wyy | Q | Gk))
    }
}

macro_rules! term {
    ($name:literal, $t:ident, $c:ident, $s:expr, [$($f:ident),*]) => {
        Term { name: $name, target: Component::$t, coef: Coef::$c, scale: $s, factors: &[$(Factor::$f),*] }
    };
}

pub const TERMS: &[Term] = &[
    term!("Fv.visc_mixed", Fv, Mu, -2.0, [G, Vxy]),
    term!("Fv.visc_yy", Fv, Mu, 1.0, [G, G, Vyy]),
    term!("Fv.visc_curv", Fv, Mu, -1.0, [Q, Vy]),
    term!("Fv.pressure", Fv, One, 1.0, [Py, G]),
    term!("Fv.conv_x", Fv, Rho, -1.0, [V, Vx]),
    term!("Fv.conv_shift", Fv, Rho, 1.0, [G, V, Vy]),
    term!("Fv.conv_y", Fv, Rho, -1.0, [W, Vy]),
    term!("Fv.moving_frame", Fv, Rho, 1.0, [Ht, Vy]),
    term!("Fw.visc_mixed", Fw, Mu, -2.0, [G, Wxy]),
    term!("Fw.visc_yy", Fw, Mu, 1.0, [G, G, Wyy]),
    term!("Fw.visc_curv", Fw, Mu, -1.0, [Q, Wy]),
    term!("Fw.conv_x", Fw, Rho, -1.0, [V, Wx]),
    term!("Fw.conv_shift", Fw, Rho, 1.0, [G, V, Wy]),
    term!("Fw.conv_y", Fw, Rho, -1.0, [W, Wy]),
    term!("Fw.moving_frame", Fw, Rho, 1.0, [Ht, Wy]),
    term!("Fd", Fd, One, 1.0, [G, Vy]),
    term!("Gv.strain_x", Gv, One, -2.0, [JVx, G]),
    term!("Gv.strain_y", Gv, One, 2.0, [G, G, JVy]),
    term!("Gv.shear_w", Gv, One, -1.0, [JWy, G]),
    term!("Gv.pressure", Gv, One, 1.0, [R, G]),
    term!("Gv.laplace", Gv, Sigma, -1.0, [Q, G]),
    term!("Gv.curv_corr", Gv, Sigma, 1.0, [Gk, G]),
    term!("Gw.shear_v", Gw, One, -1.0, [G, JVy]),
    term!("Gw.shear_wx", Gw, One, -1.0, [G, JWx]),
    term!("Gw.strain_y", Gw, One, 1.0, [G, G, JWy]),
    term!("Gw.curv_corr", Gw, Sigma, -1.0, [Gk]),
    term!("H", H, One, -1.0, [TrV, G]),
];

#[derive(Clone, Debug)]
enum Value<T> {
    Bulk(ScalarField2D<T>),
    Line(Array1<T>),
}

/// Evaluated factors of one time level.
#[derive(Clone, Debug)]
pub struct FactorSet<T> {
    values: Vec<Value<T>>,
}

impl<T: Real> FactorSet<T> {
    fn get(&self, f: Factor) -> &Value<T> {
        &self.values[f as usize]
    }

    pub fn line(&self, f: Factor) -> Option<&Array1<T>> {
        match self.get(f) {
            Value::Line(a) => Some(a),
            Value::Bulk(_) => None,
        }
    }

    pub fn bulk(&self, f: Factor) -> Option<&ScalarField2D<T>> {
        match self.get(f) {
            Value::Bulk(a) => Some(a),
            Value::Line(_) => None,
        }
    }
}

/// `mu2 a^+(0) - mu1 a^-(0)`.
fn mu_jump<T: Real>(params: &PhysicalParams<T>, a: &ScalarField2D<T>) -> Array1<T> {
    let lo = a.interface_trace(Side::Lower);
    let up = a.interface_trace(Side::Upper);
    Zip::from(&up).and(&lo).map_collect(|&u, &l| params.mu2 * u - params.mu1 * l)
}

/// Linear factors of `z`: everything except `Gk` and `Ht`, whose values are
/// filled in by the caller.
fn linear_factors<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &FlatState<T>, second: T) -> Vec<Value<T>> {
    let v = &z.u.x;
    let w = &z.u.y;
    let vx = grid.dx2d(v, 1);
    let wx = grid.dx2d(w, 1);
    let vy = grid.dy1(v);
    let wy = grid.dy1(w);
    let vxy = grid.dx2d(&vy, 1).scaled(second);
    let wxy = grid.dx2d(&wy, 1).scaled(second);
    let vyy = grid.dy2(v).scaled(second);
    let wyy = grid.dy2(w).scaled(second);
    let py = grid.dy1(&z.pi);
    let g = grid.dx1(&z.h, 1);
    let q = grid.dx1(&z.h, 2) * second;
    let jvx = mu_jump(params, &vx);
    let jvy = mu_jump(params, &vy);
    let jwx = mu_jump(params, &wx);
    let jwy = mu_jump(params, &wy);
    let trv = v.interface_trace(Side::Upper);
    let nx = grid.nx();
    let mut out: Vec<Value<T>> = (0..N_FACTORS).map(|_| Value::Line(Array1::zeros(nx))).collect();
    use Factor::*;
    let mut put = |f: Factor, val: Value<T>| out[f as usize] = val;
    put(V, Value::Bulk(v.clone()));
    put(W, Value::Bulk(w.clone()));
    put(Vx, Value::Bulk(vx));
    put(Vy, Value::Bulk(vy));
    put(Vxy, Value::Bulk(vxy));
    put(Vyy, Value::Bulk(vyy));
    put(Wx, Value::Bulk(wx));
    put(Wy, Value::Bulk(wy));
    put(Wxy, Value::Bulk(wxy));
    put(Wyy, Value::Bulk(wyy));
    put(Py, Value::Bulk(py));
    put(G, Value::Line(g));
    put(Q, Value::Line(q));
    put(JVx, Value::Line(jvx));
    put(JVy, Value::Line(jvy));
    put(JWx, Value::Line(jwx));
    put(JWy, Value::Line(jwy));
    put(R, Value::Line(z.r.clone()));
    put(TrV, Value::Line(trv));
    out
}

fn line_of<T: Real>(vals: &[Value<T>], f: Factor) -> &Array1<T> {
    match &vals[f as usize] {
        Value::Line(a) => a,
        Value::Bulk(_) => unreachable!("{f:?} is a line factor"),
    }
}

/// Factors of `z` with second derivatives multiplied by `second` (1 for the
/// actual `N`).
pub fn factors<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &FlatState<T>, second: T) -> FactorSet<T> {
    let mut vals = linear_factors(grid, params, z, second);
    let g = line_of(&vals, Factor::G).clone();
    let q = line_of(&vals, Factor::Q).clone();
    let gk = Zip::from(&g).and(&q).map_collect(|&g, &q| g_kappa_point(g, q));
    let trv = line_of(&vals, Factor::TrV);
    let trw = z.u.y.interface_trace(Side::Upper);
    let ht = Zip::from(&trw).and(trv).and(&g).map_collect(|&w, &v, &g| w - v * g);
    vals[Factor::Gk as usize] = Value::Line(gk);
    vals[Factor::Ht as usize] = Value::Line(ht);
    FactorSet { values: vals }
}

/// Factor variations in the direction `dz` at the base point with factors
/// `base`.
pub fn factor_variations<T: Real>(
    grid: &Grid<T>,
    params: &PhysicalParams<T>,
    base: &FactorSet<T>,
    z: &FlatState<T>,
    dz: &FlatState<T>,
) -> FactorSet<T> {
    let mut vals = linear_factors(grid, params, dz, T::one());
    let g = base.line(Factor::G).expect("line");
    let q = base.line(Factor::Q).expect("line");
    let dg = line_of(&vals, Factor::G).clone();
    let dq = line_of(&vals, Factor::Q).clone();
    let mut dgk = Array1::zeros(g.len());
    for i in 0..g.len() {
        let (pg, pq) = g_kappa_partials(g[i], q[i]);
        dgk[i] = pg * dg[i] + pq * dq[i];
    }
    let trv = z.u.x.interface_trace(Side::Upper);
    let dtrv = line_of(&vals, Factor::TrV).clone();
    let dtrw = dz.u.y.interface_trace(Side::Upper);
    let mut dht = Array1::zeros(g.len());
    for i in 0..g.len() {
        dht[i] = dtrw[i] - dtrv[i] * g[i] - trv[i] * dg[i];
    }
    vals[Factor::Gk as usize] = Value::Line(dgk);
    vals[Factor::Ht as usize] = Value::Line(dht);
    FactorSet { values: vals }
}

fn coef_value<T: Real>(params: &PhysicalParams<T>, c: Coef, side: Side) -> T {
    match c {
        Coef::One => T::one(),
        Coef::Mu => params.mu(side),
        Coef::Rho => params.rho(side),
        Coef::Sigma => params.sigma,
    }
}

#[derive(Clone, Debug)]
pub enum TermValue<T> {
    Bulk(ScalarField2D<T>),
    Line(Array1<T>),
}

/// Product of the term's factors where factor position `swap` (if any) is
/// read from `alt` instead of `set`.
fn product<T: Real>(
    params: &PhysicalParams<T>,
    term: &Term,
    set: &FactorSet<T>,
    alt: Option<(usize, &FactorSet<T>)>,
    nx: usize,
    ny: usize,
) -> TermValue<T> {
    let pick = |k: usize| -> &Value<T> {
        match alt {
            Some((p, a)) if p == k => a.get(term.factors[k]),
            _ => set.get(term.factors[k]),
        }
    };
    let scale = lit::<T>(term.scale);
    match term.target {
        Component::Fv | Component::Fw | Component::Fd => {
            let mut out = ScalarField2D::zeros(nx, ny);
            for side in Side::BOTH {
                out.side_mut(side).fill(scale * coef_value(params, term.coef, side));
            }
            for k in 0..term.factors.len() {
                match pick(k) {
                    Value::Bulk(b) => {
                        for side in Side::BOTH {
                            *out.side_mut(side) *= b.side(side);
                        }
                    }
                    Value::Line(l) => out = out.mul_line(l),
                }
            }
            TermValue::Bulk(out)
        }
        _ => {
            let c = scale * coef_value(params, term.coef, Side::Upper);
            let mut out = Array1::from_elem(nx, c);
            for k in 0..term.factors.len() {
                match pick(k) {
                    Value::Line(l) => out *= l,
                    Value::Bulk(_) => unreachable!("interface term with bulk factor"),
                }
            }
            TermValue::Line(out)
        }
    }
}

/// Value of one tagged term.
pub fn eval_term<T: Real>(params: &PhysicalParams<T>, term: &Term, set: &FactorSet<T>, nx: usize, ny: usize) -> TermValue<T> {
    product(params, term, set, None, nx, ny)
}

/// Directional derivative of one tagged term.
pub fn eval_term_variation<T: Real>(
    params: &PhysicalParams<T>,
    term: &Term,
    base: &FactorSet<T>,
    delta: &FactorSet<T>,
    nx: usize,
    ny: usize,
) -> TermValue<T> {
    let mut acc: Option<TermValue<T>> = None;
    for p in 0..term.factors.len() {
        let t = product(params, term, base, Some((p, delta)), nx, ny);
        acc = Some(match (acc, t) {
            (None, t) => t,
            (Some(TermValue::Bulk(a)), TermValue::Bulk(b)) => TermValue::Bulk(a.axpy(T::one(), &b)),
            (Some(TermValue::Line(a)), TermValue::Line(b)) => TermValue::Line(a + b),
            _ => unreachable!(),
        });
    }
    acc.expect("terms have at least one factor")
}

fn accumulate<T: Real>(out: &mut RhsTuple<T>, target: Component, val: TermValue<T>) {
    match (target, val) {
        (Component::Fv, TermValue::Bulk(b)) => out.f.x = out.f.x.axpy(T::one(), &b),
        (Component::Fw, TermValue::Bulk(b)) => out.f.y = out.f.y.axpy(T::one(), &b),
        (Component::Fd, TermValue::Bulk(b)) => out.fd = out.fd.axpy(T::one(), &b),
        (Component::Gv, TermValue::Line(l)) => out.gv += &l,
        (Component::Gw, TermValue::Line(l)) => out.gw += &l,
        (Component::H, TermValue::Line(l)) => out.gh += &l,
        _ => unreachable!("term target and value kind disagree"),
    }
}

/// `N(z)` at one time level, optionally restricted by a term filter.
pub fn assemble_n_filtered<T: Real>(
    grid: &Grid<T>,
    params: &PhysicalParams<T>,
    z: &FlatState<T>,
    second: T,
    keep: impl Fn(&Term) -> bool,
) -> RhsTuple<T> {
    let set = factors(grid, params, z, second);
    let mut out = RhsTuple::zeros(grid);
    for term in TERMS.iter().filter(|t| keep(t)) {
        accumulate(&mut out, term.target, eval_term(params, term, &set, grid.nx(), grid.ny()));
    }
    out
}

/// `N(z)` at one time level.
pub fn assemble_n<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &FlatState<T>) -> RhsTuple<T> {
    assemble_n_filtered(grid, params, z, T::one(), |_| true)
}

/// `DN(z)[dz]` at one time level.
pub fn linearize_n<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &FlatState<T>, dz: &FlatState<T>) -> RhsTuple<T> {
    let base = factors(grid, params, z, T::one());
    linearize_with(grid, params, &base, z, dz)
}

fn linearize_with<T: Real>(
    grid: &Grid<T>,
    params: &PhysicalParams<T>,
    base: &FactorSet<T>,
    z: &FlatState<T>,
    dz: &FlatState<T>,
) -> RhsTuple<T> {
    let delta = factor_variations(grid, params, base, z, dz);
    let mut out = RhsTuple::zeros(grid);
    for term in TERMS {
        accumulate(&mut out, term.target, eval_term_variation(params, term, base, &delta, grid.nx(), grid.ny()));
    }
    out
}

/// `N` applied to every level of a trajectory.
pub fn assemble_n_trajectory<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &[FlatState<T>]) -> Vec<RhsTuple<T>> {
    z.par_iter().map(|s| assemble_n(grid, params, s)).collect()
}

/// Level-wise `DN(z)[dz]`; precomputed base factors may be passed in.
pub fn linearize_n_trajectory<T: Real>(
    grid: &Grid<T>,
    params: &PhysicalParams<T>,
    z: &[FlatState<T>],
    dz: &[FlatState<T>],
    base: Option<&[FactorSet<T>]>,
) -> Vec<RhsTuple<T>> {
    (0..z.len())
        .into_par_iter()
        .map(|m| match base {
            Some(b) => linearize_with(grid, params, &b[m], &z[m], &dz[m]),
            None => linearize_n(grid, params, &z[m], &dz[m]),
        })
        .collect()
}

/// Base factors of every level, for repeated linearization at a fixed point.
pub fn trajectory_factors<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, z: &[FlatState<T>]) -> Vec<FactorSet<T>> {
    z.par_iter().map(|s| factors(grid, params, s, T::one())).collect()
}

/// Components `(Dxx, Dxy, Dyy)` of the transformed deformation tensor
/// `grad u + grad u^T` with the shift correction for `y -> y + h(x)`.
pub fn deformation<T: Real>(
    grid: &Grid<T>,
    u: &VectorField2D<T>,
    h: &Array1<T>,
) -> (ScalarField2D<T>, ScalarField2D<T>, ScalarField2D<T>) {
    let g = grid.dx1(h, 1);
    let vx = grid.dx2d(&u.x, 1);
    let wx = grid.dx2d(&u.y, 1);
    let vy = grid.dy1(&u.x);
    let wy = grid.dy1(&u.y);
    let two = lit::<T>(2.0);
    let dxx = vx.axpy(-T::one(), &vy.mul_line(&g)).scaled(two);
    let dxy = wx.axpy(-T::one(), &wy.mul_line(&g)).axpy(T::one(), &vy);
    let dyy = wy.scaled(two);
    (dxx, dxy, dyy)
}

/// Initial pressure jump `[mu nu^T D nu] + sigma (h0'' - G_kappa(h0))`.
pub fn jump_pressure_r0<T: Real>(grid: &Grid<T>, params: &PhysicalParams<T>, u0: &VectorField2D<T>, h0: &Array1<T>) -> Array1<T> {
    let g = grid.dx1(h0, 1);
    let q = grid.dx1(h0, 2);
    let (dxx, dxy, dyy) = deformation(grid, u0, h0);
    let mut r = Array1::zeros(grid.nx());
    let two = lit::<T>(2.0);
    for i in 0..grid.nx() {
        let s2 = T::one() + g[i] * g[i];
        let mut jump = T::zero();
        for side in Side::BOTH {
            let j = side.interface_index(grid.ny());
            let nn = (g[i] * g[i] * dxx.side(side)[(i, j)] - two * g[i] * dxy.side(side)[(i, j)] + dyy.side(side)[(i, j)]) / s2;
            let sign = if side == Side::Upper { T::one() } else { -T::one() };
            jump += sign * params.mu(side) * nn;
        }
        r[i] = jump + params.sigma * (q[i] - g_kappa_point(g[i], q[i]));
    }
    r
}

/// Residuals of the initial compatibility conditions.
#[derive(Clone, Debug)]
pub struct CompatibilityReport<T> {
    /// Tangential stress jump, `(x, y)` components.
    pub tangential: (Array1<T>, Array1<T>),
    /// `div u0 - F_d(u0, h0)` on both sides.
    pub divergence: ScalarField2D<T>,
    /// `[u0]`, `(x, y)` components.
    pub velocity_jump: (Array1<T>, Array1<T>),
    pub max_tangential: T,
    pub max_divergence: T,
    pub max_velocity_jump: T,
    pub tolerance: T,
    pub pass: bool,
}

pub fn check_compatibility<T: Real>(
    grid: &Grid<T>,
    params: &PhysicalParams<T>,
    u0: &VectorField2D<T>,
    h0: &Array1<T>,
    tolerance: T,
) -> CompatibilityReport<T> {
    let nx = grid.nx();
    let g = grid.dx1(h0, 1);
    let (dxx, dxy, dyy) = deformation(grid, u0, h0);
    let mut tx = Array1::zeros(nx);
    let mut ty = Array1::zeros(nx);
    for i in 0..nx {
        let s = (T::one() + g[i] * g[i]).sqrt();
        let (n1, n2) = (-g[i] / s, T::one() / s);
        for side in Side::BOTH {
            let j = side.interface_index(grid.ny());
            let (a, b, c) = (dxx.side(side)[(i, j)], dxy.side(side)[(i, j)], dyy.side(side)[(i, j)]);
            let (d1, d2) = (a * n1 + b * n2, b * n1 + c * n2);
            let nn = n1 * d1 + n2 * d2;
            let sign = if side == Side::Upper { T::one() } else { -T::one() };
            let mu = params.mu(side) * sign;
            tx[i] += mu * (d1 - nn * n1);
            ty[i] += mu * (d2 - nn * n2);
        }
    }
    let vx = grid.dx2d(&u0.x, 1);
    let vy = grid.dy1(&u0.x);
    let wy = grid.dy1(&u0.y);
    let divergence = vx.axpy(T::one(), &wy).axpy(-T::one(), &vy.mul_line(&g));
    let jv = &u0.x.interface_trace(Side::Upper) - &u0.x.interface_trace(Side::Lower);
    let jw = &u0.y.interface_trace(Side::Upper) - &u0.y.interface_trace(Side::Lower);
    let lmax = |a: &Array1<T>| a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let max_tangential = lmax(&tx).max(lmax(&ty));
    let max_divergence = divergence.max_abs();
    let max_velocity_jump = lmax(&jv).max(lmax(&jw));
    let pass = max_tangential <= tolerance && max_divergence <= tolerance && max_velocity_jump <= tolerance;
    CompatibilityReport {
        tangential: (tx, ty),
        divergence,
        velocity_jump: (jv, jw),
        max_tangential,
        max_divergence,
        max_velocity_jump,
        tolerance,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curvature;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Grid<f64>, PhysicalParams<f64>) {
        let grid = Grid::new(GridSpec::new(32, 17, 2.0, 0.01, 0.1)).unwrap();
        let params = PhysicalParams { rho1: 1.0, rho2: 0.8, mu1: 1.0, mu2: 0.5, sigma: 1.0 };
        (grid, params)
    }

    fn smooth_state(grid: &Grid<f64>, seed: u64) -> FlatState<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = [0.0; 8];
        for v in c.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let ly = grid.spec.ly;
        let env = move |y: f64| 1.0 - (y / ly).powi(2);
        let v = ScalarField2D::from_fn(grid, |x, y, s| {
            let k = if s == Side::Lower { c[0] } else { c[1] };
            env(y) * (c[2] * x.cos() + (x + k * y).sin())
        });
        let w = ScalarField2D::from_fn(grid, |x, y, s| {
            let k = if s == Side::Lower { c[3] } else { -c[3] };
            env(y) * ((2.0 * x).cos() * (1.0 + k * y) + c[4])
        });
        let pi = ScalarField2D::from_fn(grid, |x, y, s| if s == Side::Lower { x.sin() * y } else { 1.0 + c[5] * x.cos() });
        let h = grid.xs().mapv(|x| c[6] * x.cos() + c[7] * (2.0 * x).sin());
        let r = &pi.interface_trace(Side::Upper) - &pi.interface_trace(Side::Lower);
        FlatState { u: VectorField2D { x: v, y: w }, pi, r, h }
    }

    #[test]
    fn n_vanishes_at_zero_and_on_pressure_only_states() {
        let (grid, params) = setup();
        let z = FlatState::zeros(&grid);
        assert_eq!(assemble_n(&grid, &params, &z).max_abs(), 0.0);
        let mut zp = FlatState::zeros(&grid);
        zp.pi = smooth_state(&grid, 3).pi;
        zp.r = Array1::from_elem(grid.nx(), 0.7);
        assert_eq!(assemble_n(&grid, &params, &zp).max_abs(), 0.0);
    }

    #[test]
    fn derivative_at_zero_vanishes() {
        let (grid, params) = setup();
        let z = FlatState::zeros(&grid);
        let dz = smooth_state(&grid, 5);
        assert_eq!(linearize_n(&grid, &params, &z, &dz).max_abs(), 0.0);
    }

    #[test]
    fn pressure_constant_does_not_change_n() {
        let (grid, params) = setup();
        let z = smooth_state(&grid, 1);
        let mut z2 = z.clone();
        z2.pi = z.pi.map(|p| p + 3.5);
        let a = assemble_n(&grid, &params, &z);
        let b = assemble_n(&grid, &params, &z2);
        assert!(a.axpy(-1.0, &b).max_abs() < 1e-12);
    }

    #[test]
    fn linearization_is_linear() {
        let (grid, params) = setup();
        let z = smooth_state(&grid, 1);
        let d1 = smooth_state(&grid, 2);
        let d2 = smooth_state(&grid, 3);
        let comb = d1.scaled(0.3).axpy(-1.7, &d2);
        let lhs = linearize_n(&grid, &params, &z, &comb);
        let rhs = linearize_n(&grid, &params, &z, &d1).scaled(0.3).axpy(-1.7, &linearize_n(&grid, &params, &z, &d2));
        assert!(lhs.axpy(-1.0, &rhs).max_abs() <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn second_order_terms_scale_linearly() {
        let (grid, params) = setup();
        let z = smooth_state(&grid, 4);
        for term in TERMS {
            let one = assemble_n_filtered(&grid, &params, &z, 1.0, |t| t.name == term.name);
            let lam = assemble_n_filtered(&grid, &params, &z, 2.5, |t| t.name == term.name);
            let expect = if term.is_second_order() { one.scaled(2.5) } else { one.clone() };
            assert!(lam.axpy(-1.0, &expect).max_abs() <= 1e-12 * (1.0 + one.max_abs()), "{}", term.name);
        }
    }

    #[test]
    fn linearization_matches_central_differences() {
        let (grid, params) = setup();
        let z = smooth_state(&grid, 7).scaled(0.5);
        let dz = smooth_state(&grid, 8);
        let d = linearize_n(&grid, &params, &z, &dz);
        let mut errs = vec![];
        for s in [1e-2, 5e-3] {
            let p = assemble_n(&grid, &params, &z.axpy(s, &dz));
            let m = assemble_n(&grid, &params, &z.axpy(-s, &dz));
            let fd = p.axpy(-1.0, &m).scaled(0.5 / s);
            errs.push(fd.axpy(-1.0, &d).max_abs());
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!((rate - 2.0).abs() < 0.2, "{errs:?}");
    }

    #[test]
    fn r0_reduces_for_flat_interface() {
        let (grid, params) = setup();
        let z = smooth_state(&grid, 9);
        let h0 = Array1::zeros(grid.nx());
        let r0 = jump_pressure_r0(&grid, &params, &z.u, &h0);
        let wy = grid.dy1(&z.u.y);
        for i in 0..grid.nx() {
            let want = 2.0 * (params.mu2 * wy.upper[(i, 0)] - params.mu1 * wy.lower[(i, grid.ny() - 1)]);
            assert!((r0[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn r0_is_capillary_pressure_at_rest() {
        let (grid, params) = setup();
        let h0 = grid.xs().mapv(|x| 0.1 * x.cos());
        let u0 = VectorField2D::zeros(grid.nx(), grid.ny());
        let r0 = jump_pressure_r0(&grid, &params, &u0, &h0);
        let k = curvature(&grid, &h0);
        assert!((&r0 - &(k * params.sigma)).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn compatibility_flags_divergence() {
        let (grid, params) = setup();
        let h0 = grid.xs().mapv(|x| 0.1 * x.sin());
        let zero = VectorField2D::zeros(grid.nx(), grid.ny());
        assert!(check_compatibility(&grid, &params, &zero, &h0, 1e-12).pass);
        let psi = |y: f64| (-y * y).exp();
        let w = ScalarField2D::from_fn(&grid, |_, y, _| y * psi(y));
        let u0 = VectorField2D { x: ScalarField2D::zeros(grid.nx(), grid.ny()), y: w };
        let rep = check_compatibility(&grid, &params, &u0, &Array1::zeros(grid.nx()), 1e-6);
        assert!(!rep.pass);
        // d/dy (y psi) = 1 at y = 0
        assert!((rep.divergence.upper[(0, 0)] - 1.0).abs() < 5e-2);
    }
}
