use capflow::fixed_point::{solve_forward, solve_sensitivity, Control, Direction, FixedPointOptions, PhysicalVectorField};
use capflow::grid::PhysicalField2D;
use capflow::state::{trajectory_axpy, trajectory_norm};
use capflow::stokes::StokesSolver;
use capflow::{Error, Grid, GridSpec, PhysicalParams, ScalarField2D, VectorField2D};
use ndarray::Array1;

fn setup(nx: usize, ny: usize) -> (Grid, StokesSolver<f64>) {
    let grid = Grid::new(GridSpec::new(nx, ny, 2.0, 0.05, 0.25)).unwrap();
    let params = PhysicalParams { rho1: 1.0, rho2: 0.8, mu1: 1.0, mu2: 0.5, sigma: 1.0 };
    let solver = StokesSolver::new(&grid, &params).unwrap();
    (grid, solver)
}

fn bump(x: f64, y: f64, x0: f64, y0: f64) -> f64 {
    let d = (x - x0).sin().powi(2) / 0.5 + (y - y0).powi(2) / 0.4;
    (-d).exp()
}

fn flat_bump(grid: &Grid, amp: f64, x0: f64, y0: f64) -> Control<f64> {
    let levels = grid.spec.n_steps() + 1;
    Control::Flat(
        (0..levels)
            .map(|m| {
                let t = grid.spec.dt * m as f64;
                VectorField2D {
                    x: ScalarField2D::from_fn(grid, |x, y, _| amp * (1.0 + t) * bump(x, y, x0, y0)),
                    y: ScalarField2D::from_fn(grid, |x, y, _| -0.5 * amp * bump(x, y, x0 + 1.0, y0)),
                }
            })
            .collect(),
    )
}

fn opts(tol: f64) -> FixedPointOptions<f64> {
    FixedPointOptions { tol, max_iter: 60 }
}

#[test]
fn zero_data_converges_in_one_iteration() {
    let (grid, solver) = setup(16, 17);
    let (z, rep) = solve_forward(&solver, &VectorField2D::zeros(16, 17), &Array1::zeros(16), &Control::zero_flat(&grid), &opts(1e-10)).unwrap();
    assert_eq!(rep.iterations, 1);
    assert!(z.iter().all(|s| s.max_abs() == 0.0));
}

#[test]
fn small_data_contracts() {
    let (grid, solver) = setup(16, 17);
    let h0 = grid.xs().mapv(|x| 0.01 * x.cos());
    let (_, rep) = solve_forward(&solver, &VectorField2D::zeros(16, 17), &h0, &Control::zero_flat(&grid), &opts(1e-12)).unwrap();
    assert!(rep.converged);
    assert!(rep.max_ratio() < 1.0, "{:?}", rep.ratios);
    // ratios settle; allow roundoff at the tail
    let head = &rep.update_norms[..rep.update_norms.len().min(5)];
    assert!(head.windows(2).all(|w| w[1] < w[0]), "{:?}", rep.update_norms);
    assert!(rep.final_residual < 1e-10);
}

#[test]
fn forward_is_shift_equivariant() {
    let (grid, solver) = setup(16, 17);
    let dx = grid.dx();
    let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
    let h0s = grid.xs().mapv(|x| 0.05 * (x - dx).cos());
    let c = flat_bump(&grid, 0.5, 1.0, 0.3);
    let cs = flat_bump(&grid, 0.5, 1.0 + dx, 0.3);
    let u0 = VectorField2D::zeros(16, 17);
    let (a, _) = solve_forward(&solver, &u0, &h0, &c, &opts(1e-12)).unwrap();
    let (b, _) = solve_forward(&solver, &u0, &h0s, &cs, &opts(1e-12)).unwrap();
    for (p, q) in a.iter().zip(&b) {
        for i in 0..16 {
            assert!((p.h[i] - q.h[(i + 1) % 16]).abs() < 1e-10);
            assert!((p.u.x.upper[(i, 3)] - q.u.x.upper[((i + 1) % 16, 3)]).abs() < 1e-10);
        }
    }
}

#[test]
fn sensitivity_basics() {
    let (grid, solver) = setup(16, 17);
    let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
    let c = flat_bump(&grid, 0.5, 1.0, 0.3);
    let u0 = VectorField2D::zeros(16, 17);
    let (z, _) = solve_forward(&solver, &u0, &h0, &c, &opts(1e-12)).unwrap();

    let zero = Direction::control_only(&grid, Control::zero_flat(&grid));
    let (dz, _) = solve_sensitivity(&solver, &z, &c, &zero, &opts(1e-12), None).unwrap();
    assert!(dz.iter().all(|s| s.max_abs() == 0.0));

    let d1 = flat_bump(&grid, 1.0, 2.0, -0.5);
    let d2 = flat_bump(&grid, 1.0, 4.0, 0.6);
    let comb = d1.axpy(2.0, &d2).unwrap().scaled(0.5);
    let run = |d: Control<f64>, g: Option<&[capflow::FlatState]>| solve_sensitivity(&solver, &z, &c, &Direction::control_only(&grid, d), &opts(1e-13), g).unwrap().0;
    let s1 = run(d1.clone(), None);
    let s2 = run(d2, None);
    let sc = run(comb, None);
    let lin: Vec<_> = trajectory_axpy(&s1, 2.0, &s2).iter().map(|s| s.scaled(0.5)).collect();
    let err = trajectory_norm(&grid, &trajectory_axpy(&sc, -1.0, &lin)) / trajectory_norm(&grid, &lin);
    assert!(err < 1e-10, "{err}");

    // independent of the initial guess
    let s1b = run(d1, Some(&s2));
    let err = trajectory_norm(&grid, &trajectory_axpy(&s1b, -1.0, &s1)) / trajectory_norm(&grid, &s1);
    assert!(err < 1e-10, "{err}");

    let mut moving = Direction::control_only(&grid, Control::zero_flat(&grid));
    moving.dh0[0] = 1e-3;
    assert!(matches!(solve_sensitivity(&solver, &z, &c, &moving, &opts(1e-12), None), Err(Error::InterfaceDirection)));
}

#[test]
fn taylor_remainder_is_second_order() {
    let (grid, solver) = setup(16, 33);
    let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
    let c = flat_bump(&grid, 0.5, 1.0, 0.3);
    let d = flat_bump(&grid, 1.0, 2.5, -0.2);
    let u0 = VectorField2D::zeros(16, 33);
    let o = opts(1e-14);
    let (z, _) = solve_forward(&solver, &u0, &h0, &c, &o).unwrap();
    let (dz, _) = solve_sensitivity(&solver, &z, &c, &Direction::control_only(&grid, d.clone()), &o, None).unwrap();
    let mut rem = Vec::new();
    let ss = [1e-1, 1e-2, 1e-3];
    for s in ss {
        let (zs, _) = solve_forward(&solver, &u0, &h0, &c.axpy(s, &d).unwrap(), &o).unwrap();
        let r = trajectory_axpy(&trajectory_axpy(&zs, -1.0, &z), -s, &dz);
        rem.push(trajectory_norm(&grid, &r));
    }
    let slope = (rem[0] / rem[2]).ln() / (ss[0] / ss[2]).ln();
    assert!((slope - 2.0).abs() < 0.1, "{rem:?} {slope}");
}

#[test]
fn physical_control_independent_of_y_matches_flat() {
    let (grid, solver) = setup(16, 33);
    let h0 = grid.xs().mapv(|x| 0.05 * x.cos());
    let levels = grid.spec.n_steps() + 1;
    let cf = Control::Flat(vec![
        VectorField2D { x: ScalarField2D::from_fn(&grid, |x, _, _| 0.3 * x.sin()), y: ScalarField2D::from_fn(&grid, |x, _, _| 0.1 * x.cos()) };
        levels
    ]);
    let cp = Control::Physical(vec![
        PhysicalVectorField {
            x: PhysicalField2D::from_fn(&grid, |x, _| 0.3 * x.sin()),
            y: PhysicalField2D::from_fn(&grid, |x, _| 0.1 * x.cos()),
        };
        levels
    ]);
    let u0 = VectorField2D::zeros(16, 33);
    let (a, _) = solve_forward(&solver, &u0, &h0, &cf, &opts(1e-12)).unwrap();
    let (b, _) = solve_forward(&solver, &u0, &h0, &cp, &opts(1e-12)).unwrap();
    let err = trajectory_norm(&grid, &trajectory_axpy(&a, -1.0, &b)) / trajectory_norm(&grid, &a);
    assert!(err < 1e-12, "{err}");
}
