use capflow::fixed_point::{solve_forward, solve_sensitivity, Control, Direction, FixedPointOptions};
use capflow::state::FlatState;
use capflow::stokes::StokesSolver;
use capflow::vof::*;
use capflow::{Grid, GridSpec, PhysicalParams, ScalarField2D, VectorField2D};

fn params() -> PhysicalParams {
    PhysicalParams { rho1: 1.0, rho2: 0.8, mu1: 1.0, mu2: 0.5, sigma: 1.0 }
}

fn gauss(x: f64, y: f64, x0: f64, y0: f64) -> f64 {
    let d = (x - x0).sin().powi(2) / 0.5 + (y - y0).powi(2) / 0.4;
    (-d).exp()
}

fn steady(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Control<f64> {
    let field = VectorField2D {
        x: ScalarField2D::from_fn(grid, |x, y, _| f(x, y)[0]),
        y: ScalarField2D::from_fn(grid, |x, y, _| f(x, y)[1]),
    };
    Control::Flat(vec![field; grid.spec.n_steps() + 1])
}

fn phi() -> VectorBump {
    VectorBump { bump: Bump { x0: 1.0, y0: 0.05, a: 1.2, b: 0.6 }, c: [0.7, -0.4] }
}

fn psi() -> Bump {
    Bump { x0: 2.0, y0: -0.1, a: 1.0, b: 0.5 }
}

#[test]
fn static_flat_state_has_zero_residual() {
    let grid = Grid::new(GridSpec::new(16, 17, 2.0, 0.05, 0.5)).unwrap();
    let z = vec![FlatState::zeros(&grid); grid.spec.n_steps() + 1];
    let c = Control::zero_flat(&grid);
    let opts = ResidualOptions::new(MollifierSpec::new(0.2, 0.1).unwrap());
    let r = vof_forward_residual(&grid, &params(), &z, &c, &phi(), &psi(), &opts).unwrap();
    assert!(r.momentum.abs() < 1e-14 && r.divergence == 0.0, "{r:?}");
    let inp = SensitivityInputs { z: &z, control: &c, dz: &z, dcontrol: &c };
    let r = vof_sensitivity_residual(&grid, &params(), &inp, &phi(), &psi(), &opts).unwrap();
    assert!(r.momentum.abs() < 1e-14 && r.divergence == 0.0, "{r:?}");
}

#[test]
fn residuals_decrease_under_refinement() {
    let mut fwd = Vec::new();
    let mut lin = Vec::new();
    for (n, dt, eps) in [(16, 0.04, 0.2), (32, 0.02, 0.1), (64, 0.01, 0.05)] {
        let grid = Grid::new(GridSpec::new(n, n + 1, std::f64::consts::PI, dt, 0.5)).unwrap();
        let solver = StokesSolver::new(&grid, &params()).unwrap();
        let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
        let c = steady(&grid, |x, y| [0.3 * gauss(x, y, 1.0, 0.2), 0.0]);
        let dc = steady(&grid, |x, y| [0.0, gauss(x, y, 2.0, -0.2)]);
        let fp = FixedPointOptions { tol: 1e-11, max_iter: 60 };
        let (z, _) = solve_forward(&solver, &VectorField2D::zeros(n, n + 1), &h0, &c, &fp).unwrap();
        let (dz, _) = solve_sensitivity(&solver, &z, &c, &Direction::control_only(&grid, dc.clone()), &fp, None).unwrap();
        let opts = ResidualOptions::new(MollifierSpec::new(0.2, eps).unwrap());
        let f = vof_forward_residual(&grid, &params(), &z, &c, &phi(), &psi(), &opts).unwrap();
        let inp = SensitivityInputs { z: &z, control: &c, dz: &dz, dcontrol: &dc };
        let s = vof_sensitivity_residual(&grid, &params(), &inp, &phi(), &psi(), &opts).unwrap();
        fwd.push(f.relative().max(f.divergence_relative()));
        lin.push(s.relative().max(s.divergence_relative()));
    }
    assert!(fwd.windows(2).all(|w| w[1] < w[0]), "{fwd:?}");
    assert!(lin.windows(2).all(|w| w[1] < w[0]), "{lin:?}");
    assert!(fwd[2] < 1e-2 && lin[2] < 1e-2, "{fwd:?} {lin:?}");
}

#[test]
fn transported_indicator_follows_computed_interface() {
    let mut areas = Vec::new();
    for (n, dt) in [(16, 0.04), (32, 0.02), (64, 0.01)] {
        let grid = Grid::new(GridSpec::new(n, n + 1, std::f64::consts::PI, dt, 0.5)).unwrap();
        let solver = StokesSolver::new(&grid, &params()).unwrap();
        let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
        let c = steady(&grid, |x, y| [gauss(x, y, 1.0, 0.2), 0.5 * gauss(x, y, 2.5, 0.0)]);
        let fp = FixedPointOptions { tol: 1e-11, max_iter: 60 };
        let (z, _) = solve_forward(&solver, &VectorField2D::zeros(n, n + 1), &h0, &c, &fp).unwrap();
        let sampler = TrajectorySampler::new(&grid, &z);
        let g0 = spectral_graph(&grid, &z[0].h);
        let phase = PhaseField { flow: CharacteristicFlow { sampler: &sampler, step: dt / 4.0 }, h0: &g0 };
        let last = z.last().unwrap();
        let ht = spectral_graph(&grid, &last.h);
        let area = symmetric_difference(&phase, grid.spec.t0, &ht, 64, 0.05);
        assert!(area <= 2.0 * grid.dx() * std::f64::consts::TAU);
        areas.push(area);
    }
    let rates: Vec<f64> = areas.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    assert!(rates.iter().all(|r| *r > 0.8), "{areas:?} {rates:?}");
}
