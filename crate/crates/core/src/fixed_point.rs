//! Picard iteration for the transformed nonlinear problem `L z = N(z) + (c, 0)`
//! and for its linearization in a direction `(du0, dc)`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::grid::{Grid, PhysicalField2D, VectorField2D};
use crate::rhs::{assemble_n_trajectory, check_compatibility, linearize_n_trajectory, trajectory_factors};
use crate::scalar::{lit, Real};
use crate::state::{trajectory_axpy, trajectory_norm, FlatState, RhsTuple, Trajectory};
use crate::stokes::StokesSolver;
use crate::transform::pullback_control;

/// A vector field on the physical strip.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalVectorField<T> {
    pub x: PhysicalField2D<T>,
    pub y: PhysicalField2D<T>,
}

impl<T: Real> PhysicalVectorField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self { x: PhysicalField2D::zeros(grid), y: PhysicalField2D::zeros(grid) }
    }

    fn axpy(&self, a: T, o: &Self) -> Self {
        Self {
            x: PhysicalField2D { values: &self.x.values + &(&o.x.values * a) },
            y: PhysicalField2D { values: &self.y.values + &(&o.y.values * a) },
        }
    }
}

/// Momentum control, one field per time level. `Flat` is used as is;
/// `Physical` is pulled back along the current interface every iteration.
#[derive(Clone, Debug, PartialEq)]
pub enum Control<T> {
    Flat(Vec<VectorField2D<T>>),
    Physical(Vec<PhysicalVectorField<T>>),
}

impl<T: Real> Control<T> {
    pub fn zero_flat(grid: &Grid<T>) -> Self {
        Control::Flat(vec![VectorField2D::zeros(grid.nx(), grid.ny()); grid.spec.n_steps() + 1])
    }

    pub fn zero_physical(grid: &Grid<T>) -> Self {
        Control::Physical(vec![PhysicalVectorField::zeros(grid); grid.spec.n_steps() + 1])
    }

    pub fn levels(&self) -> usize {
        match self {
            Control::Flat(c) => c.len(),
            Control::Physical(c) => c.len(),
        }
    }

    pub fn is_physical(&self) -> bool {
        matches!(self, Control::Physical(_))
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Control::Flat(c) => c.iter().all(|f| f.is_finite()),
            Control::Physical(c) => c.iter().all(|f| f.x.values.iter().chain(f.y.values.iter()).all(|v| v.is_finite())),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        match self {
            Control::Flat(c) => Control::Flat(c.iter().map(|f| f.scaled(a)).collect()),
            Control::Physical(c) => Control::Physical(c.iter().map(|f| f.axpy(a - T::one(), f)).collect()),
        }
    }

    /// `self + a * other`; both must be of the same kind.
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        match (self, other) {
            (Control::Flat(p), Control::Flat(q)) => Ok(Control::Flat(p.iter().zip(q).map(|(x, y)| x.axpy(a, y)).collect())),
            (Control::Physical(p), Control::Physical(q)) => {
                Ok(Control::Physical(p.iter().zip(q).map(|(x, y)| x.axpy(a, y)).collect()))
            }
            _ => Err(Error::Shape("flat and physical controls cannot be combined".into())),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FixedPointOptions<T> {
    /// Stop once the update norm is below `tol * (1 + |z|)`.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for FixedPointOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-10), max_iter: 50 }
    }
}

/// Convergence history of a Picard iteration.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ContractionReport {
    pub iterations: usize,
    /// `|z^{k+1} - z^k|` in the trajectory norm.
    pub update_norms: Vec<f64>,
    /// Successive update ratios, an empirical contraction factor.
    pub ratios: Vec<f64>,
    pub converged: bool,
    /// `|K(z) - z|` at the returned iterate.
    pub final_residual: f64,
}

impl ContractionReport {
    fn push(&mut self, update: f64) {
        if let Some(&prev) = self.update_norms.last() {
            self.ratios.push(if prev > 0.0 { update / prev } else { 0.0 });
        }
        self.update_norms.push(update);
        self.iterations += 1;
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

fn flat_controls<T: Real>(grid: &Grid<T>, control: &Control<T>, z: &[FlatState<T>]) -> Result<Vec<VectorField2D<T>>> {
    match control {
        Control::Flat(c) => Ok(c.clone()),
        Control::Physical(c) => c
            .iter()
            .zip(z)
            .map(|(c, s)| {
                let (x, _) = pullback_control(grid, &c.x, &s.h, None)?;
                let (y, _) = pullback_control(grid, &c.y, &s.h, None)?;
                Ok(VectorField2D { x: x.field, y: y.field })
            })
            .collect(),
    }
}

fn with_control<T: Real>(mut rhs: Vec<RhsTuple<T>>, c: &[VectorField2D<T>]) -> Vec<RhsTuple<T>> {
    for (r, c) in rhs.iter_mut().zip(c) {
        r.f = r.f.axpy(T::one(), c);
    }
    rhs
}

fn check_levels<T: Real>(grid: &Grid<T>, control: &Control<T>) -> Result<()> {
    let want = grid.spec.n_steps() + 1;
    if control.levels() != want {
        return Err(Error::Shape(format!("control has {} levels, grid has {want}", control.levels())));
    }
    if !control.is_finite() {
        return Err(Error::NonFinite("control"));
    }
    Ok(())
}

/// Picard iteration `z^{k+1} = L^{-1}(N(z^k) + (c_k, 0); u0, h0)`.
///
/// Starts from the trajectory frozen at the initial data. Returns the last
/// iterate with its contraction history, or `NoConvergence` after
/// `max_iter` iterations.
pub fn solve_forward<T: Real>(
    solver: &StokesSolver<T>,
    u0: &VectorField2D<T>,
    h0: &Array1<T>,
    control: &Control<T>,
    opts: &FixedPointOptions<T>,
) -> Result<(Trajectory<T>, ContractionReport)> {
    let grid = solver.grid();
    let params = solver.params();
    check_levels(grid, control)?;
    let compat = check_compatibility(grid, params, u0, h0, lit(1e-6));
    if !compat.pass {
        log::warn!(
            "initial data violate compatibility: tangential {:e}, divergence {:e}, jump {:e}",
            compat.max_tangential.as_f64(),
            compat.max_divergence.as_f64(),
            compat.max_velocity_jump.as_f64()
        );
    }
    let start = FlatState { u: u0.clone(), h: h0.clone(), ..FlatState::zeros(grid) };
    let mut z: Trajectory<T> = vec![start; grid.spec.n_steps() + 1];
    let apply = |z: &[FlatState<T>]| -> Result<Trajectory<T>> {
        let c = flat_controls(grid, control, z)?;
        let rhs = with_control(assemble_n_trajectory(grid, params, z), &c);
        solver.solve(&rhs, u0, h0)
    };
    let mut report = ContractionReport::default();
    for _ in 0..opts.max_iter {
        let next = apply(&z)?;
        if !next.iter().all(|s| s.is_finite()) {
            return Err(Error::NonFinite("Picard iterate"));
        }
        let update = trajectory_norm(grid, &trajectory_axpy(&next, -T::one(), &z));
        let scale = T::one() + trajectory_norm(grid, &next);
        report.push(update.as_f64());
        z = next;
        log::debug!("picard {}: update {:e}", report.iterations, update.as_f64());
        if update <= opts.tol * scale {
            report.converged = true;
            break;
        }
    }
    let check = apply(&z)?;
    report.final_residual = trajectory_norm(grid, &trajectory_axpy(&check, -T::one(), &z)).as_f64();
    if !report.converged {
        return Err(Error::NoConvergence {
            iterations: report.iterations,
            last_update: report.update_norms.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok((z, report))
}

/// Direction of differentiation: initial velocity, initial interface
/// (must vanish) and control.
#[derive(Clone, Debug)]
pub struct Direction<T> {
    pub du0: VectorField2D<T>,
    pub dh0: Array1<T>,
    pub dc: Control<T>,
}

impl<T: Real> Direction<T> {
    pub fn control_only(grid: &Grid<T>, dc: Control<T>) -> Self {
        Self { du0: VectorField2D::zeros(grid.nx(), grid.ny()), dh0: Array1::zeros(grid.nx()), dc }
    }
}

/// Linearized Picard iteration
/// `dz^{k+1} = L^{-1}(DN(z)[dz^k] + (dc_total, 0); du0, 0)` about a
/// converged forward solution `z`.
///
/// With a physical control, `dc_total` carries the interface motion term
/// `d_y c * dh`. Directions moving the initial interface are rejected.
pub fn solve_sensitivity<T: Real>(
    solver: &StokesSolver<T>,
    z: &[FlatState<T>],
    control: &Control<T>,
    direction: &Direction<T>,
    opts: &FixedPointOptions<T>,
    guess: Option<&[FlatState<T>]>,
) -> Result<(Trajectory<T>, ContractionReport)> {
    let grid = solver.grid();
    let params = solver.params();
    if direction.dh0.iter().any(|v| *v != T::zero()) {
        return Err(Error::InterfaceDirection);
    }
    check_levels(grid, &direction.dc)?;
    if z.len() != grid.spec.n_steps() + 1 {
        return Err(Error::Shape("base trajectory does not match the grid".into()));
    }
    let base = trajectory_factors(grid, params, z);
    let dh0 = Array1::zeros(grid.nx());
    let apply = |dz: &[FlatState<T>]| -> Result<Trajectory<T>> {
        let dc: Vec<VectorField2D<T>> = match (&direction.dc, control) {
            (Control::Flat(d), _) => d.clone(),
            (Control::Physical(d), Control::Physical(c)) => (0..z.len())
                .map(|m| {
                    let (_, x) = pullback_control(grid, &c[m].x, &z[m].h, Some((&d[m].x, &dz[m].h)))?;
                    let (_, y) = pullback_control(grid, &c[m].y, &z[m].h, Some((&d[m].y, &dz[m].h)))?;
                    Ok(VectorField2D { x: x.expect("direction given"), y: y.expect("direction given") })
                })
                .collect::<Result<_>>()?,
            (Control::Physical(_), Control::Flat(_)) => {
                return Err(Error::Shape("physical direction about a flat control".into()));
            }
        };
        let rhs = with_control(linearize_n_trajectory(grid, params, z, dz, Some(&base)), &dc);
        solver.solve(&rhs, &direction.du0, &dh0)
    };
    let mut dz: Trajectory<T> = match guess {
        Some(g) => g.to_vec(),
        None => vec![FlatState::zeros(grid); z.len()],
    };
    let mut report = ContractionReport::default();
    for _ in 0..opts.max_iter {
        let next = apply(&dz)?;
        if !next.iter().all(|s| s.is_finite()) {
            return Err(Error::NonFinite("sensitivity iterate"));
        }
        let update = trajectory_norm(grid, &trajectory_axpy(&next, -T::one(), &dz));
        let scale = T::one() + trajectory_norm(grid, &next);
        report.push(update.as_f64());
        dz = next;
        if update <= opts.tol * scale {
            report.converged = true;
            break;
        }
    }
    let check = apply(&dz)?;
    report.final_residual = trajectory_norm(grid, &trajectory_axpy(&check, -T::one(), &dz)).as_f64();
    if !report.converged {
        return Err(Error::NoConvergence {
            iterations: report.iterations,
            last_update: report.update_norms.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok((dz, report))
}
