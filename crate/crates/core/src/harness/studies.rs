//! One driver per [`StudyKind`]. Each returns a table and gated metrics.

use rayon::prelude::*;

use crate::error::Result;
use crate::fixed_point::{solve_forward, solve_sensitivity, FixedPointOptions};
use crate::grid::Grid;
use crate::state::FlatState;
use crate::stokes::StokesSolver;
use crate::vof::{
    cosine, delta_normal_interface, lemma_normal_sides, normal_interface, seeded_suite, spectral_graph, surface_tension_term,
    symmetric_difference, vof_forward_residual, vof_sensitivity_residual, CharacteristicFlow, FnGraph, Graph, GradientForm,
    InterfaceMeasure, MollifierSpec, PhaseField, ResidualOptions, SensitivityInputs, SurfaceForm, TrajectorySampler,
};

use super::config::{Config, ControlKind, StudyKind};
use super::data::{seeded_directions, BaseData};
use super::mms::mms_study;
use super::output::{num, Metric, StudyOutput};
use super::stats::{loglog_slope, pairwise_rates, strictly_decreasing};
use super::taylor::{taylor_test, TaylorNorm};

/// Identity tolerance for the weak-form checks.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Final relative VoF residual allowed at the finest level.
pub const VOF_FINAL_TOL: f64 = 1e-2;

pub fn run_study(config: &Config) -> Result<StudyOutput> {
    config.validate()?;
    log::info!("running study {}", config.study.name());
    match config.study {
        StudyKind::Smoke => smoke(config),
        StudyKind::Taylor => taylor(config),
        StudyKind::Mms => mms(config),
        StudyKind::Mollifier => mollifier(config),
        StudyKind::Identities => identities(config),
        StudyKind::VofForward => vof(config, false),
        StudyKind::VofSensitivity => vof(config, true),
        StudyKind::Transport => transport(config),
    }
}

fn fp_options(config: &Config) -> FixedPointOptions<f64> {
    FixedPointOptions { tol: config.fixed_point_tol, max_iter: config.fixed_point_max_iter }
}

fn setup(config: &Config, spec: crate::grid::GridSpec<f64>) -> Result<(Grid<f64>, StokesSolver<f64>, BaseData)> {
    let grid = Grid::new(spec)?;
    let solver = StokesSolver::new(&grid, &config.params)?;
    let base = BaseData::new(&grid, config.control_kind, config.h0_amplitude, config.control_amplitude);
    Ok((grid, solver, base))
}

fn smoke(config: &Config) -> Result<StudyOutput> {
    let (grid, solver, base) = setup(config, config.grid.clone())?;
    let (z, report) = solve_forward(&solver, &base.u0, &base.h0, &base.control, &fp_options(config))?;
    let mut out = StudyOutput::new(&["step", "t", "max_u", "max_pi", "max_h"]);
    let mut worst: f64 = 0.0;
    for (m, s) in z.iter().enumerate() {
        let mu = s.u.max_abs();
        let mp = s.pi.max_abs();
        let mh = s.h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        worst = worst.max(mu).max(mp).max(mh);
        out.row([m.to_string(), num(grid.spec.dt * m as f64), num(mu), num(mp), num(mh)]);
    }
    out.metric("picard_iterations", Metric::at_most(report.iterations as f64, config.fixed_point_max_iter as f64));
    if config.h0_amplitude == 0.0 && config.control_amplitude == 0.0 {
        out.metric("max_state", Metric::at_most(worst, 0.0));
    }
    Ok(out)
}

fn taylor(config: &Config) -> Result<StudyOutput> {
    let (grid, solver, base) = setup(config, config.grid.clone())?;
    let dirs = seeded_directions(&grid, config.control_kind, config.seed, config.taylor_directions);
    let norm = match config.control_kind {
        ControlKind::Flat => TaylorNorm::Flat,
        ControlKind::Physical => TaylorNorm::Physical,
    };
    let s = config.s_values();
    let report = taylor_test(&solver, &base, &dirs, &s, norm, &fp_options(config))?;
    let mut out = StudyOutput::new(&["direction", "s", "remainder", "quotient_error", "off_band_remainder"]);
    for r in &report.rows {
        let off = r.off_band.map(num).unwrap_or_default();
        out.row([r.direction.to_string(), num(r.s), num(r.remainder), num(r.quotient_error), off]);
    }
    if report.degenerate() {
        out.metric("degenerate", Metric::holds(true));
        return Ok(out);
    }
    let (lo, hi) = report.slope_range();
    out.metric("slope_min", Metric::within(lo, 2.0, 0.1));
    out.metric("slope_max", Metric::within(hi, 2.0, 0.1));
    if norm == TaylorNorm::Physical {
        // remainder / s against s: one order below the remainder itself
        out.metric("quotient_slope_min", Metric::at_least(lo - 1.0, 0.9));
        let (olo, ohi) = report.off_band_slope_range();
        out.metric("off_band_slope_min", Metric::within(olo, 2.0, 0.1));
        out.metric("off_band_slope_max", Metric::within(ohi, 2.0, 0.1));
    }
    Ok(out)
}

fn mms(config: &Config) -> Result<StudyOutput> {
    let g = &config.grid;
    let r = mms_study(&config.params, g.nx, g.ly, g.t0, config.mms_ny0, config.mms_dt0, config.mms_halvings)?;
    let mut out = StudyOutput::new(&["kind", "ny", "dt", "error", "interface_residual"]);
    for l in &r.levels {
        out.row([l.kind.to_string(), l.ny.to_string(), num(l.dt), num(l.error), num(l.interface_residual)]);
    }
    out.metric("spatial_rate", Metric::at_least(r.spatial_rate(), 1.8));
    out.metric("temporal_rate", Metric::at_least(r.temporal_rate(), 0.9));
    out.metric("interface_residual", Metric::at_most(r.max_interface_residual, 1e-8));
    Ok(out)
}

/// Interface errors `max |nu_eps - (-h', 1)|` and `max |dnu_eps - (-dh', 0)|`
/// at 32 points for `h = a cos x`, `dh = 0.3 sin 2x`.
pub fn mollifier_errors(amplitude: f64, spec: &MollifierSpec) -> Result<(f64, f64)> {
    let g = cosine(amplitude, 1.0);
    let dg = FnGraph(|x: f64| [0.3 * (2.0 * x).sin(), 0.6 * (2.0 * x).cos(), -1.2 * (2.0 * x).sin()]);
    let (mut en, mut ed) = (0.0f64, 0.0f64);
    for i in 0..32 {
        let x = std::f64::consts::TAU * i as f64 / 32.0;
        let n = normal_interface(&g, spec, x)?;
        en = en.max((n[0] + g.eval(x)[1]).abs().max((n[1] - 1.0).abs()));
        let d = delta_normal_interface(&g, &dg, spec, x)?;
        ed = ed.max((d[0] + dg.eval(x)[1]).abs().max(d[1].abs()));
    }
    Ok((en, ed))
}

fn mollifier(config: &Config) -> Result<StudyOutput> {
    let mut out = StudyOutput::new(&["eps", "normal_error", "variation_error"]);
    let (mut eps, mut en, mut ed) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..config.levels {
        let e = config.level_eps(k);
        let (a, b) = mollifier_errors(config.h0_amplitude, &MollifierSpec::new(config.mollifier.delta, e)?)?;
        out.row([num(e), num(a), num(b)]);
        eps.push(e);
        en.push(a);
        ed.push(b);
    }
    let rate = |v: &[f64]| loglog_slope(&eps, v).unwrap_or(f64::NAN);
    out.metric("normal_rate", Metric::at_least(rate(&en), 1.9));
    out.metric("variation_rate", Metric::at_least(rate(&ed), 1.9));
    Ok(out)
}

/// Per test function: the discrepancies of the divergence identity, the two
/// forms of the indicator-gradient variation and the two surface-tension
/// forms, for `h = 0.2 cos x` and `dh = 0.3 cos 2x + 0.1`.
pub fn identity_discrepancies(seed: u64, n: usize, sigma: f64) -> Vec<[f64; 3]> {
    let h = cosine(0.2, 1.0);
    let dh = FnGraph(|x: f64| [0.3 * (2.0 * x).cos() + 0.1, -0.6 * (2.0 * x).sin(), -1.2 * (2.0 * x).cos()]);
    let m = InterfaceMeasure::new(&h, &dh);
    let suite = seeded_suite(seed, n, 0.25);
    suite
        .par_iter()
        .map(|phi| {
            let (v, g) = lemma_normal_sides(&h, phi);
            let a = m.pair_gradient(phi, GradientForm::Divergence);
            let b = m.pair_gradient(phi, GradientForm::Parts);
            let c = surface_tension_term(&h, phi, sigma, SurfaceForm::Curvature);
            let d = surface_tension_term(&h, phi, sigma, SurfaceForm::ByParts);
            [(v - g).abs(), (a - b).abs(), (c - d).abs()]
        })
        .collect()
}

fn identities(config: &Config) -> Result<StudyOutput> {
    let d = identity_discrepancies(config.seed, config.test_functions, config.params.sigma);
    let mut out = StudyOutput::new(&["test_function", "normal_lemma", "indicator_variation", "surface_forms"]);
    let mut worst = [0.0f64; 3];
    for (k, r) in d.iter().enumerate() {
        out.row([k.to_string(), num(r[0]), num(r[1]), num(r[2])]);
        for c in 0..3 {
            worst[c] = worst[c].max(r[c]);
        }
    }
    out.metric("normal_lemma", Metric::at_most(worst[0], IDENTITY_TOL));
    out.metric("indicator_variation", Metric::at_most(worst[1], IDENTITY_TOL));
    out.metric("surface_forms", Metric::at_most(worst[2], IDENTITY_TOL));
    Ok(out)
}

/// Residual of one refinement level, forward or linearized.
#[derive(Clone, Debug)]
pub struct VofLevel {
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub eps: f64,
    pub momentum: f64,
    pub divergence: f64,
}

impl VofLevel {
    pub fn worst(&self) -> f64 {
        self.momentum.max(self.divergence)
    }
}

/// Forward and linearized VoF residuals at level `k` of `config`.
pub fn vof_level(config: &Config, k: usize) -> Result<(VofLevel, VofLevel)> {
    let (grid, solver, base) = setup(config, config.level_grid(k))?;
    let fp = fp_options(config);
    let (z, _) = solve_forward(&solver, &base.u0, &base.h0, &base.control, &fp)?;
    let dir = seeded_directions(&grid, config.control_kind, config.seed, 1).remove(0);
    let (dz, _) = solve_sensitivity(&solver, &z, &base.control, &dir, &fp, None)?;
    let eps = config.level_eps(k);
    let opts = ResidualOptions::new(MollifierSpec::new(config.mollifier.delta, eps)?);
    let phi = seeded_suite(config.seed, 1, 0.1)[0];
    let psi = seeded_suite(config.seed.wrapping_add(1), 1, 0.1)[0].bump;
    let f = vof_forward_residual(&grid, &config.params, &z, &base.control, &phi, &psi, &opts)?;
    let inputs = SensitivityInputs { z: &z, control: &base.control, dz: &dz, dcontrol: &dir.dc };
    let s = vof_sensitivity_residual(&grid, &config.params, &inputs, &phi, &psi, &opts)?;
    let level = |momentum, divergence| VofLevel { nx: grid.nx(), ny: grid.ny(), dt: grid.spec.dt, eps, momentum, divergence };
    Ok((level(f.relative(), f.divergence_relative()), level(s.relative(), s.divergence_relative())))
}

fn vof(config: &Config, linearized: bool) -> Result<StudyOutput> {
    let levels: Vec<VofLevel> = (0..config.levels)
        .map(|k| vof_level(config, k).map(|(f, s)| if linearized { s } else { f }))
        .collect::<Result<_>>()?;
    let mut out = StudyOutput::new(&["nx", "ny", "dt", "eps", "momentum_relative", "divergence_relative"]);
    for l in &levels {
        out.row([l.nx.to_string(), l.ny.to_string(), num(l.dt), num(l.eps), num(l.momentum), num(l.divergence)]);
    }
    let worst: Vec<f64> = levels.iter().map(VofLevel::worst).collect();
    out.metric("monotone", Metric::holds(strictly_decreasing(&worst)));
    out.metric("final_relative", Metric::at_most(*worst.last().expect("levels >= 1"), VOF_FINAL_TOL));
    Ok(out)
}

/// Area between the transported phase and `{y < h(t0, x)}` at level `k`,
/// with the allowed bound `2 dx Lx`.
pub fn transport_level(config: &Config, k: usize) -> Result<(f64, f64, f64)> {
    let (grid, solver, base) = setup(config, config.level_grid(k))?;
    let (z, _) = solve_forward(&solver, &base.u0, &base.h0, &base.control, &fp_options(config))?;
    let area = transported_area(&grid, &z);
    Ok((grid.dx(), area, 2.0 * grid.dx() * grid.spec.lx))
}

/// Symmetric-difference area at the final time of `z`.
pub fn transported_area(grid: &Grid<f64>, z: &[FlatState<f64>]) -> f64 {
    let sampler = TrajectorySampler::new(grid, z);
    let g0 = spectral_graph(grid, &z[0].h);
    let phase = PhaseField { flow: CharacteristicFlow { sampler: &sampler, step: grid.spec.dt / 4.0 }, h0: &g0 };
    let ht = spectral_graph(grid, &z.last().expect("nonempty trajectory").h);
    symmetric_difference(&phase, grid.spec.dt * (z.len() - 1) as f64, &ht, 64, 0.05)
}

fn transport(config: &Config) -> Result<StudyOutput> {
    let rows: Vec<(f64, f64, f64)> = (0..config.levels).map(|k| transport_level(config, k)).collect::<Result<_>>()?;
    let mut out = StudyOutput::new(&["dx", "area", "bound"]);
    for (dx, a, b) in &rows {
        out.row([num(*dx), num(*a), num(*b)]);
    }
    let dx: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let area: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (_, last, bound) = *rows.last().expect("levels >= 1");
    out.metric("final_area", Metric::at_most(last, bound));
    out.metric("rate", Metric::at_least(loglog_slope(&dx, &area).unwrap_or(f64::NAN), 0.9));
    let min_pair = pairwise_rates(&area, 2.0).into_iter().fold(f64::INFINITY, f64::min);
    out.metric("min_pairwise_rate", Metric::at_least(min_pair, 0.9));
    Ok(out)
}
