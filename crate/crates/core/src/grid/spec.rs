use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Resolution and extent of the flat computational strip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    /// Number of x nodes (even, at least 8).
    pub nx: usize,
    /// x-period.
    pub lx: T,
    /// Nodes per half-strip, interface node included.
    pub ny: usize,
    /// Half-strip extent; the strip is `y in [-ly, ly]`.
    pub ly: T,
    pub dt: T,
    /// Final time.
    pub t0: T,
    /// Exponent of the diagnostic `L^p` norms; must exceed 4.
    pub p_diag: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(nx: usize, ny: usize, ly: T, dt: T, t0: T) -> Self {
        Self { nx, lx: T::TAU(), ny, ly, dt, t0, p_diag: lit(6.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| {
            Err(Error::InvalidParameter { name: name.into(), reason: reason.into() })
        };
        if self.nx < 8 || !self.nx.is_multiple_of(2) {
            return bad("grid.Nx", "must be even and >= 8");
        }
        if self.ny < 8 {
            return bad("grid.Ny", "must be >= 8");
        }
        if !(self.lx > T::zero()) || !self.lx.is_finite() {
            return bad("grid.Lx", "must be positive");
        }
        if !(self.ly > T::zero()) || !self.ly.is_finite() {
            return bad("grid.Ly", "must be positive");
        }
        if !(self.dt > T::zero()) {
            return bad("grid.dt", "must be positive");
        }
        if !(self.t0 >= self.dt) {
            return bad("grid.t0", "must be >= dt");
        }
        if !(self.p_diag > lit(4.0)) {
            return bad("grid.p_diag", "must be > 4");
        }
        Ok(())
    }

    /// Number of time steps `M`; levels are `0..=M`.
    pub fn n_steps(&self) -> usize {
        (self.t0 / self.dt).round().to_usize().unwrap_or(1).max(1)
    }

    pub fn dx(&self) -> T {
        self.lx / T::of(self.nx)
    }

    pub fn dy(&self) -> T {
        self.ly / T::of(self.ny - 1)
    }
}

/// Material constants of the two phases; phase 1 lies below the interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    pub rho1: T,
    pub rho2: T,
    pub mu1: T,
    pub mu2: T,
    pub sigma: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("params.rho1", self.rho1),
            ("params.rho2", self.rho2),
            ("params.mu1", self.mu1),
            ("params.mu2", self.mu2),
            ("params.sigma", self.sigma),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter { name: name.into(), reason: "must be > 0".into() });
            }
        }
        Ok(())
    }

    pub fn rho(&self, side: super::Side) -> T {
        match side {
            super::Side::Lower => self.rho1,
            super::Side::Upper => self.rho2,
        }
    }

    pub fn mu(&self, side: super::Side) -> T {
        match side {
            super::Side::Lower => self.mu1,
            super::Side::Upper => self.mu2,
        }
    }
}

/// A validated [`GridSpec`] together with FFT plans and node coordinates.
#[derive(Clone)]
pub struct Grid<T: Real> {
    pub spec: GridSpec<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    wavenumbers: Vec<T>,
}

impl<T: Real> std::fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl<T: Real> Grid<T> {
    pub fn new(spec: GridSpec<T>) -> Result<Self> {
        spec.validate()?;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(spec.nx);
        let inv = planner.plan_fft_inverse(spec.nx);
        let n = spec.nx;
        let base = T::TAU() / spec.lx;
        let wavenumbers = (0..n)
            .map(|m| {
                let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                base * lit(signed)
            })
            .collect();
        Ok(Self { spec, fwd, inv, wavenumbers })
    }

    pub fn nx(&self) -> usize {
        self.spec.nx
    }

    pub fn ny(&self) -> usize {
        self.spec.ny
    }

    pub fn dx(&self) -> T {
        self.spec.dx()
    }

    pub fn dy(&self) -> T {
        self.spec.dy()
    }

    pub fn x(&self, i: usize) -> T {
        self.dx() * T::of(i)
    }

    pub fn xs(&self) -> ndarray::Array1<T> {
        ndarray::Array1::from_shape_fn(self.nx(), |i| self.x(i))
    }

    /// y coordinate of node `j` on `side` (`j = ny-1` / `j = 0` is the interface).
    pub fn y(&self, side: super::Side, j: usize) -> T {
        let dy = self.dy();
        match side {
            super::Side::Lower => -self.spec.ly + dy * T::of(j),
            super::Side::Upper => dy * T::of(j),
        }
    }

    /// Signed angular wavenumber of FFT bin `m`.
    pub fn wavenumber(&self, m: usize) -> T {
        self.wavenumbers[m]
    }

    pub fn nyquist(&self) -> usize {
        self.spec.nx / 2
    }

    pub fn forward(&self, line: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = line.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform including the `1/N` normalization; returns the real part.
    pub fn inverse(&self, mut modes: Vec<Complex<T>>) -> Vec<T> {
        self.inv.process(&mut modes);
        let scale = T::one() / T::of(self.nx());
        modes.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn inverse_complex(&self, modes: &mut [Complex<T>]) {
        self.inv.process(modes);
        let scale = T::one() / T::of(self.nx());
        for c in modes.iter_mut() {
            *c *= scale;
        }
    }
}
