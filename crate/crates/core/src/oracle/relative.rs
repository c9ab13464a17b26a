//! Relative-coordinate reduction of the two-body contact problem.
//!
//! With `X = (x1 + x2)/2` and `x = x1 - x2`,
//! `-d^2/dx1^2 - d^2/dx2^2 = -(1/2) d^2/dX^2 - 2 d^2/dx^2`, so
//! `H = H_com + 2 [-d^2/dx^2 + c delta(x)]`. The centre-of-mass part is free,
//! commutes with the rest and only contributes a global phase, so it is
//! dropped. Plane waves `exp(i p2 x1 + i p1 x2)` carry relative momentum
//! `k = (p2 - p1)/2`, and the reduced problem `-psi'' + c delta(x) psi = k^2 psi`
//! has the jump condition `psi'(0+) - psi'(0-) = c psi(0)`.
//!
//! Stationary matching then gives
//! `t = 2ik / (2ik - c)`, `r = c / (2ik - c)`, and the even-channel combination
//! `t + r = (2ik + c)/(2ik - c) = (2k - ic)/(2k + ic)`, which is the two-body
//! phase at `p2 - p1 = 2k`. The odd channel sees `t - r = 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_finite, Error, Result};

/// Parameters of the reduced one-body problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeProblem {
    /// Coefficient of `-d^2/dx^2` before dividing through by 2.
    pub kinetic_coefficient: f64,
    /// Weight of `delta(x)` before dividing through by 2 (equals `2c`).
    pub contact_weight: f64,
    /// `psi'(0+) - psi'(0-) = jump_coefficient * psi(0)` in the unit-kinetic form.
    pub jump_coefficient: f64,
}

/// Reduce `H = -d1^2 - d2^2 + 2c delta(x1 - x2)` to the relative coordinate.
pub fn reduce_to_relative(c: f64) -> Result<RelativeProblem> {
    require_finite("c", c)?;
    if c < 0.0 {
        return Err(Error::invalid("c", format!("coupling must be non-negative, got {c}")));
    }
    Ok(RelativeProblem { kinetic_coefficient: 2.0, contact_weight: 2.0 * c, jump_coefficient: c })
}

impl RelativeProblem {
    /// `k = (p2 - p1) / 2`.
    pub fn relative_momentum(p2: f64, p1: f64) -> f64 {
        0.5 * (p2 - p1)
    }

    /// Relative energy of the unit-kinetic problem is half the two-body energy.
    pub fn energy_scale(&self) -> f64 {
        1.0 / self.kinetic_coefficient
    }

    pub fn transmission(&self, k: f64) -> Complex64 {
        let den = Complex64::new(-self.jump_coefficient, 2.0 * k);
        Complex64::new(0.0, 2.0 * k) / den
    }

    pub fn reflection(&self, k: f64) -> Complex64 {
        let den = Complex64::new(-self.jump_coefficient, 2.0 * k);
        Complex64::from(self.jump_coefficient) / den
    }

    /// `t + r` at relative momentum `k`.
    pub fn even_channel(&self, k: f64) -> Complex64 {
        self.transmission(k) + self.reflection(k)
    }

    /// `t - r` at relative momentum `k`; identically one for a contact barrier.
    pub fn odd_channel(&self, k: f64) -> Complex64 {
        self.transmission(k) - self.reflection(k)
    }
}
