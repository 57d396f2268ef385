//! Flat `section.key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are rejected so a
//! typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhysicalParams};
use crate::vof::MollifierSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Smoke,
    Taylor,
    Mms,
    Mollifier,
    Identities,
    VofForward,
    VofSensitivity,
    Transport,
}

impl StudyKind {
    pub const ALL: [StudyKind; 8] = [
        StudyKind::Smoke,
        StudyKind::Taylor,
        StudyKind::Mms,
        StudyKind::Mollifier,
        StudyKind::Identities,
        StudyKind::VofForward,
        StudyKind::VofSensitivity,
        StudyKind::Transport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Smoke => "smoke",
            StudyKind::Taylor => "taylor",
            StudyKind::Mms => "mms",
            StudyKind::Mollifier => "mollifier",
            StudyKind::Identities => "identities",
            StudyKind::VofForward => "vof_forward",
            StudyKind::VofSensitivity => "vof_sensitivity",
            StudyKind::Transport => "transport",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            StudyKind::Smoke => "one forward solve of the base data; all-zero data must give the zero state",
            StudyKind::Taylor => "control-to-state Taylor remainders and fitted slope (flat or physical norm)",
            StudyKind::Mms => "manufactured-solution spatial and temporal convergence of the Stokes solver",
            StudyKind::Mollifier => "epsilon sweep of the mollified normal and its variation at the interface",
            StudyKind::Identities => "weak identities for the indicator gradient, its variation and surface tension",
            StudyKind::VofForward => "VoF momentum and divergence residuals under grid and epsilon refinement",
            StudyKind::VofSensitivity => "linearized VoF residuals under grid and epsilon refinement",
            StudyKind::Transport => "indicator transport against the computed interface under refinement",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::UnknownStudy(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Flat,
    Physical,
}

/// Fully resolved configuration; echoed into every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub study: StudyKind,
    pub seed: u64,
    pub grid: GridSpec<f64>,
    pub params: PhysicalParams<f64>,
    pub control_kind: ControlKind,
    /// Amplitude of the initial interface `a cos x`.
    pub h0_amplitude: f64,
    /// Amplitude of the base control bump.
    pub control_amplitude: f64,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iter: usize,
    pub taylor_s_max: f64,
    pub taylor_s_min: f64,
    pub taylor_s_count: usize,
    pub taylor_directions: usize,
    pub mms_ny0: usize,
    pub mms_dt0: f64,
    pub mms_halvings: usize,
    /// `eps` is the finest level; each coarser level doubles it.
    pub mollifier: MollifierSpec,
    /// Refinement levels; the configured grid is the finest.
    pub levels: usize,
    pub test_functions: usize,
    pub output_dir: String,
}

const KEYS: &[&str] = &[
    "study.name",
    "seed",
    "grid.Nx",
    "grid.Ny",
    "grid.Ly",
    "grid.dt",
    "grid.t0",
    "grid.p_diag",
    "params.rho1",
    "params.rho2",
    "params.mu1",
    "params.mu2",
    "params.sigma",
    "control.kind",
    "data.h0_amplitude",
    "data.control_amplitude",
    "fixed_point.tol",
    "fixed_point.max_iter",
    "taylor.s_max",
    "taylor.s_min",
    "taylor.s_count",
    "taylor.directions",
    "mms.Ny0",
    "mms.dt0",
    "mms.halvings",
    "mollifier.delta",
    "mollifier.eps",
    "study.levels",
    "study.test_functions",
    "output.dir",
];

const REQUIRED: &[&str] = &["study.name", "grid.Nx", "grid.Ny"];

/// Raw key-value pairs with line numbers.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", n + 1)));
            }
            if entries.insert(k.to_string(), (v.to_string(), n + 1)).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
            }
        }
        for k in REQUIRED {
            if !entries.contains_key(*k) {
                return Err(Error::Config(format!("missing required key `{k}`")));
            }
        }
        Ok(Self { entries })
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| Error::InvalidParameter {
                name: key.to_string(),
                reason: format!("cannot parse `{v}` (line {line})"),
            }),
        }
    }
}

fn invalid(name: &str, reason: &str) -> Error {
    Error::InvalidParameter { name: name.into(), reason: reason.into() }
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        let study = StudyKind::parse(&raw.get::<String>("study.name", String::new())?)?;
        let mut grid = GridSpec::new(
            raw.get("grid.Nx", 0usize)?,
            raw.get("grid.Ny", 0usize)?,
            raw.get("grid.Ly", std::f64::consts::PI)?,
            raw.get("grid.dt", 0.01)?,
            raw.get("grid.t0", 0.5)?,
        );
        grid.p_diag = raw.get("grid.p_diag", 6.0)?;
        grid.validate()?;
        let params = PhysicalParams {
            rho1: raw.get("params.rho1", 1.0)?,
            rho2: raw.get("params.rho2", 0.8)?,
            mu1: raw.get("params.mu1", 1.0)?,
            mu2: raw.get("params.mu2", 0.5)?,
            sigma: raw.get("params.sigma", 1.0)?,
        };
        params.validate()?;
        let control_kind = match raw.get::<String>("control.kind", "flat".into())?.as_str() {
            "flat" => ControlKind::Flat,
            "physical" => ControlKind::Physical,
            _ => return Err(invalid("control.kind", "must be `flat` or `physical`")),
        };
        let mollifier = MollifierSpec::new(raw.get("mollifier.delta", 0.2)?, raw.get("mollifier.eps", 0.025)?)?;
        let cfg = Config {
            study,
            seed: raw.get("seed", 0)?,
            grid,
            params,
            control_kind,
            h0_amplitude: raw.get("data.h0_amplitude", 0.05)?,
            control_amplitude: raw.get("data.control_amplitude", 0.3)?,
            fixed_point_tol: raw.get("fixed_point.tol", 1e-11)?,
            fixed_point_max_iter: raw.get("fixed_point.max_iter", 60)?,
            taylor_s_max: raw.get("taylor.s_max", 1e-1)?,
            taylor_s_min: raw.get("taylor.s_min", 1e-3)?,
            taylor_s_count: raw.get("taylor.s_count", 3)?,
            taylor_directions: raw.get("taylor.directions", 3)?,
            mms_ny0: raw.get("mms.Ny0", 9)?,
            mms_dt0: raw.get("mms.dt0", 0.05)?,
            mms_halvings: raw.get("mms.halvings", 3)?,
            mollifier,
            levels: raw.get("study.levels", 3)?,
            test_functions: raw.get("study.test_functions", 20)?,
            output_dir: raw.get("output.dir", "capflow-out".to_string())?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(name, "must be > 0")) };
        if !(self.h0_amplitude.is_finite() && self.h0_amplitude >= 0.0) {
            return Err(invalid("data.h0_amplitude", "must be >= 0"));
        }
        if !self.control_amplitude.is_finite() {
            return Err(invalid("data.control_amplitude", "must be finite"));
        }
        finite_pos("fixed_point.tol", self.fixed_point_tol)?;
        if self.fixed_point_max_iter == 0 {
            return Err(invalid("fixed_point.max_iter", "must be >= 1"));
        }
        finite_pos("taylor.s_min", self.taylor_s_min)?;
        if !(self.taylor_s_max > self.taylor_s_min) {
            return Err(invalid("taylor.s_max", "must exceed taylor.s_min"));
        }
        if self.taylor_s_count < 2 {
            return Err(invalid("taylor.s_count", "must be >= 2"));
        }
        if self.taylor_directions == 0 {
            return Err(invalid("taylor.directions", "must be >= 1"));
        }
        if self.mms_ny0 < 8 {
            return Err(invalid("mms.Ny0", "must be >= 8"));
        }
        finite_pos("mms.dt0", self.mms_dt0)?;
        if self.mms_halvings < 2 {
            return Err(invalid("mms.halvings", "must be >= 2"));
        }
        let refined = matches!(self.study, StudyKind::VofForward | StudyKind::VofSensitivity | StudyKind::Transport);
        if self.levels < 3 {
            return Err(invalid("study.levels", "must be >= 3"));
        }
        if refined {
            let k = 1usize << (self.levels - 1);
            if !self.grid.nx.is_multiple_of(2 * k) || !(self.grid.ny - 1).is_multiple_of(k) || self.grid.nx / k < 8 || (self.grid.ny - 1) / k + 1 < 8 {
                return Err(invalid("study.levels", "grid.Nx and grid.Ny - 1 must stay even and >= 8 after halving"));
            }
        }
        if self.test_functions == 0 {
            return Err(invalid("study.test_functions", "must be >= 1"));
        }
        Ok(())
    }

    /// Log-spaced `s` values from `s_max` down to `s_min`.
    pub fn s_values(&self) -> Vec<f64> {
        let n = self.taylor_s_count;
        let (a, b) = (self.taylor_s_max.ln(), self.taylor_s_min.ln());
        (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
    }

    /// Grid of refinement level `k` (0 = coarsest, `levels - 1` = configured).
    pub fn level_grid(&self, k: usize) -> GridSpec<f64> {
        let f = 1usize << (self.levels - 1 - k);
        let mut g = self.grid.clone();
        g.nx /= f;
        g.ny = (g.ny - 1) / f + 1;
        g.dt *= f as f64;
        g
    }

    pub fn level_eps(&self, k: usize) -> f64 {
        self.mollifier.eps * (1usize << (self.levels - 1 - k)) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_defaults() {
        let c = Config::parse("study.name = taylor\ngrid.Nx=32 # x nodes\ngrid.Ny = 33\nparams.sigma=2\n").unwrap();
        assert_eq!(c.study, StudyKind::Taylor);
        assert_eq!((c.grid.nx, c.grid.ny, c.params.sigma, c.params.mu2), (32, 33, 2.0, 0.5));
        let s = c.s_values();
        assert!((s[0] - 0.1).abs() < 1e-15 && (s[2] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn errors_name_the_field() {
        let e = Config::parse("study.name=smoke\ngrid.Ny=33\n").unwrap_err().to_string();
        assert!(e.contains("grid.Nx"), "{e}");
        let e = Config::parse("study.name=smoke\ngrid.Nx=32\ngrid.Ny=33\nparams.mu1=-1\n").unwrap_err().to_string();
        assert!(e.contains("params.mu1"), "{e}");
        let e = Config::parse("study.name=smoke\ngrid.Nx=32\ngrid.Ny=33\ngrid.nx=4\n").unwrap_err().to_string();
        assert!(e.contains("grid.nx"), "{e}");
        assert!(matches!(Config::parse("study.name=nope\ngrid.Nx=32\ngrid.Ny=33\n"), Err(Error::UnknownStudy(_))));
    }

    #[test]
    fn refinement_levels_halve_the_grid() {
        let c = Config::parse("study.name=vof_forward\ngrid.Nx=64\ngrid.Ny=65\ngrid.dt=0.005\nmollifier.eps=0.025\n").unwrap();
        let g = c.level_grid(0);
        assert_eq!((g.nx, g.ny), (16, 17));
        assert!((g.dt - 0.02).abs() < 1e-15 && (c.level_eps(0) - 0.1).abs() < 1e-15);
    }
}
