//! Base data and seeded perturbation directions for the studies.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fixed_point::{Control, Direction, PhysicalVectorField};
use crate::grid::{Grid, PhysicalField2D, ScalarField2D, VectorField2D};

use super::config::ControlKind;

/// Smooth periodic bump `exp(-sin^2(x - x0)/0.5 - (y - y0)^2/0.4)`.
pub fn gauss(x: f64, y: f64, x0: f64, y0: f64) -> f64 {
    let d = (x - x0).sin().powi(2) / 0.5 + (y - y0).powi(2) / 0.4;
    (-d).exp()
}

/// Control `amp (1 + t) (cx, cy) gauss(x, y; x0, y0)` on every time level.
#[derive(Clone, Copy, Debug)]
pub struct BumpControl {
    pub x0: f64,
    pub y0: f64,
    pub amp: [f64; 2],
}

impl BumpControl {
    pub fn build(&self, grid: &Grid<f64>, kind: ControlKind) -> Control<f64> {
        let levels = grid.spec.n_steps() + 1;
        let (x0, y0, amp) = (self.x0, self.y0, self.amp);
        let f = move |t: f64, x: f64, y: f64, c: usize| amp[c] * (1.0 + t) * gauss(x, y, x0, y0);
        let dt = grid.spec.dt;
        match kind {
            ControlKind::Flat => Control::Flat(
                (0..levels)
                    .map(|m| {
                        let t = dt * m as f64;
                        VectorField2D {
                            x: ScalarField2D::from_fn(grid, |x, y, _| f(t, x, y, 0)),
                            y: ScalarField2D::from_fn(grid, |x, y, _| f(t, x, y, 1)),
                        }
                    })
                    .collect(),
            ),
            ControlKind::Physical => Control::Physical(
                (0..levels)
                    .map(|m| {
                        let t = dt * m as f64;
                        PhysicalVectorField {
                            x: PhysicalField2D::from_fn(grid, |x, y| f(t, x, y, 0)),
                            y: PhysicalField2D::from_fn(grid, |x, y| f(t, x, y, 1)),
                        }
                    })
                    .collect(),
            ),
        }
    }
}

/// Initial data `(u0, h0) = (0, a cos x)` and the base control.
pub struct BaseData {
    pub u0: VectorField2D<f64>,
    pub h0: Array1<f64>,
    pub control: Control<f64>,
}

impl BaseData {
    pub fn new(grid: &Grid<f64>, kind: ControlKind, h0_amplitude: f64, control_amplitude: f64) -> Self {
        let bump = BumpControl { x0: 1.0, y0: 0.2, amp: [control_amplitude, -0.5 * control_amplitude] };
        Self {
            u0: VectorField2D::zeros(grid.nx(), grid.ny()),
            h0: grid.xs().mapv(|x| h0_amplitude * x.cos()),
            control: bump.build(grid, kind),
        }
    }
}

/// Seeded control-only directions: bumps with centres in `[0, 2pi) x
/// [-0.5, 0.5]` and component amplitudes in `[-1, 1]`.
pub fn seeded_directions(grid: &Grid<f64>, kind: ControlKind, seed: u64, n: usize) -> Vec<Direction<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let b = BumpControl {
                x0: rng.random_range(0.0..std::f64::consts::TAU),
                y0: rng.random_range(-0.5..0.5),
                amp: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            };
            Direction::control_only(grid, b.build(grid, kind))
        })
        .collect()
}
