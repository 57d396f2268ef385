use crate::error::{Error, Result};

/// Mollifier parameters: plateau width `delta` and scale `eps`.
///
/// The y-factor is the plateau profile, the x-factor the unit-mass profile,
/// so `phi_eps(x, y) = psi_mass(x / eps) psi_plat(y / eps) / eps`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MollifierSpec {
    pub delta: f64,
    pub eps: f64,
}

impl MollifierSpec {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidParameter { name: "mollifier.delta".into(), reason: "must lie in (0, 1/2)".into() });
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter { name: "mollifier.eps".into(), reason: "must be positive".into() });
        }
        Ok(Self { delta, eps })
    }

    /// `phi_eps` at offset `(dx, dy)`.
    pub fn phi(&self, dx: f64, dy: f64) -> f64 {
        psi_mass(dx / self.eps) * psi_plat(dy / self.eps, self.delta) / self.eps
    }

    /// Gradient of `phi_eps` at offset `(dx, dy)`.
    pub fn grad_phi(&self, dx: f64, dy: f64) -> (f64, f64) {
        let (sx, sy) = (dx / self.eps, dy / self.eps);
        let e2 = self.eps * self.eps;
        (
            psi_mass_deriv(sx) * psi_plat(sy, self.delta) / e2,
            psi_mass(sx) * psi_plat_deriv(sy, self.delta) / e2,
        )
    }
}

/// `(15/16)(1 - s^2)^2` on `|s| < 1`: even, C^1, unit integral.
pub fn psi_mass(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - s * s;
    0.9375 * q * q
}

pub fn psi_mass_deriv(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    -3.75 * s * (1.0 - s * s)
}

/// Equal to 1 on `|s| <= 1 - delta`, falling to 0 at `|s| = 1` along the
/// C^1 smoothstep `3t^2 - 2t^3`.
pub fn psi_plat(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if a >= 1.0 {
        0.0
    } else if a <= 1.0 - delta {
        1.0
    } else {
        let t = (1.0 - a) / delta;
        t * t * (3.0 - 2.0 * t)
    }
}

pub fn psi_plat_deriv(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if a >= 1.0 || a <= 1.0 - delta {
        return 0.0;
    }
    let t = (1.0 - a) / delta;
    -6.0 * t * (1.0 - t) / delta * s.signum()
}
