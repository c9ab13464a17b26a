use thiserror::Error;

/// Errors raised by gate construction, entanglement analysis, the
/// propagation oracle and the physical-parameter bridge.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed a domain check (sign, ordering, finiteness).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A matrix that must be unitary is not.
    #[error("matrix is not unitary (max |U^dag U - I| = {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// A state that must be normalized is not.
    #[error("state is not normalized (norm deviation {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    /// Propagation lost or gained probability beyond tolerance.
    #[error("norm drift {drift:.3e} exceeds {limit:.1e} at step {step}")]
    NormDrift { drift: f64, limit: f64, step: usize },

    /// The wavepacket reached the edge of the computational domain.
    #[error("wavepacket touched the grid boundary at step {step} (edge probability {probability:.3e})")]
    BoundaryContact { probability: f64, step: usize },

    /// Scattered components are still overlapping the barrier region.
    #[error("scattered packets not separated from the barrier (probability {probability:.3e} near origin)")]
    NotSeparated { probability: f64 },

    /// Extracted amplitudes violate |t|^2 + |r|^2 = 1.
    #[error("extracted amplitudes not unitary: |t|^2+|r|^2-1 = {defect:.3e} (limit {limit:.1e})")]
    AmplitudeUnitarity { defect: f64, limit: f64 },

    /// |t + r| far from one: the even-channel combination is inconsistent.
    #[error("even-channel combination |t+r| = {modulus:.3e} is inconsistent with elastic scattering")]
    EvenChannelInconsistent { modulus: f64 },

    /// Gauss-Hermite average changed when doubling the quadrature order.
    #[error("quadrature not converged: order {order} vs {doubled} differ by {change:.3e}")]
    QuadratureNotConverged { order: usize, doubled: usize, change: f64 },

    /// The 1D coupling denominator is too close to the confinement-induced resonance.
    #[error("too close to confinement-induced resonance (1 - C a/a_perp = {denominator:.3})")]
    ConfinementResonance { denominator: f64 },

    /// Malformed setup file.
    #[error("config parse error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of numerical quality (unitarity, boundary contact,
    /// convergence) as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotUnitary { .. }
                | Error::NormDrift { .. }
                | Error::BoundaryContact { .. }
                | Error::NotSeparated { .. }
                | Error::AmplitudeUnitarity { .. }
                | Error::EvenChannelInconsistent { .. }
                | Error::QuadratureNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
