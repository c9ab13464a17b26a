//! Amplitude extraction from propagated states.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::grid::{BarrierSpec, GridSpec, Mesh, WavepacketSpec};
use super::propagate::{propagate, propagate_state, Wavefunction};
use crate::error::{Error, Result};

/// `| |t|^2 + |r|^2 - 1 |` above this means the run is not trustworthy.
pub const RAW_UNITARITY_LIMIT: f64 = 1e-4;
/// Probability allowed within one packet width of the barrier after the run.
pub const SEPARATION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringAmplitudes {
    pub t: Complex64,
    pub r: Complex64,
    pub k: f64,
}

impl ScatteringAmplitudes {
    pub fn unitarity_defect(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

/// Projects `scattered` onto `+k0` and `-k0` and divides by the `+k0`
/// component of `reference`, the barrier-free twin of the same packet.
///
/// `t` is read from `x > 0` and `r` from `x < 0`. On the graded mesh a
/// packet's transform at the opposite momentum is not negligible (about
/// 1e-4 of the main peak), so whole-mesh transforms would leak `t` into `r`.
/// With a mirror-symmetric mesh the reflected packet sees the same
/// discretization as the free one and that error cancels in the ratio.
pub fn extract_amplitudes(
    scattered: &Wavefunction,
    reference: &Wavefunction,
    packet: &WavepacketSpec,
) -> Result<ScatteringAmplitudes> {
    packet.validate()?;
    if !Arc::ptr_eq(scattered.mesh(), reference.mesh()) && **scattered.mesh() != **reference.mesh() {
        return Err(Error::invalid("reference", "twin run lives on a different mesh"));
    }
    let s = packet.sigma_x;
    for wf in [scattered, reference] {
        let probability = wf.probability_where(|x| x.abs() < s);
        if !(probability <= SEPARATION_LIMIT) {
            return Err(Error::NotSeparated { probability });
        }
    }
    let k = packet.k0;
    let right = |x: f64| x > 0.0;
    let left = |x: f64| x < 0.0;
    let norm = reference.fourier_where(k, right);
    let amps = ScatteringAmplitudes {
        t: scattered.fourier_where(k, right) / norm,
        r: scattered.fourier_where(-k, left) / norm,
        k,
    };
    let defect = amps.unitarity_defect();
    if !(defect <= RAW_UNITARITY_LIMIT) {
        return Err(Error::AmplitudeUnitarity { defect, limit: RAW_UNITARITY_LIMIT });
    }
    Ok(amps)
}

/// Runs the packet with and without the barrier and extracts `(t, r)`.
pub fn scatter(grid: &GridSpec, packet: &WavepacketSpec, barrier: &BarrierSpec) -> Result<ScatteringAmplitudes> {
    let free = propagate(grid, packet, None)?;
    let hit = propagate(grid, packet, Some(barrier))?;
    extract_amplitudes(&hit, &free, packet)
}

/// `arg(t + r)` in `(-pi, pi]`.
pub fn even_channel_phase(amp: &ScatteringAmplitudes) -> Result<f64> {
    let sum = amp.t + amp.r;
    let modulus = sum.norm();
    if !(modulus >= 0.5) {
        return Err(Error::EvenChannelInconsistent { modulus });
    }
    let defect = amp.unitarity_defect();
    if !(defect <= RAW_UNITARITY_LIMIT) {
        return Err(Error::AmplitudeUnitarity { defect, limit: RAW_UNITARITY_LIMIT });
    }
    let phase = sum.arg();
    Ok(if phase == -std::f64::consts::PI { std::f64::consts::PI } else { phase })
}

/// Odd-channel scattering factor `t - r`, measured directly from an
/// antisymmetrized packet against its barrier-free twin.
pub fn odd_channel_factor(grid: &GridSpec, packet: &WavepacketSpec, barrier: Option<&BarrierSpec>) -> Result<Complex64> {
    let Some(b) = barrier else {
        return Ok(Complex64::from(1.0));
    };
    packet.validate()?;
    b.validate()?;
    b.check_against(packet.k0)?;
    let mesh = Arc::new(Mesh::build(grid)?);
    let free = propagate_state(grid, Wavefunction::antisymmetric_packet(mesh.clone(), packet)?, None)?;
    let hit = propagate_state(grid, Wavefunction::antisymmetric_packet(mesh, packet)?, Some(b))?;
    for wf in [&free, &hit] {
        let probability = wf.probability_where(|x| x.abs() < packet.sigma_x);
        if !(probability <= SEPARATION_LIMIT) {
            return Err(Error::NotSeparated { probability });
        }
    }
    Ok(hit.fourier(packet.k0) / free.fourier(packet.k0))
}

/// `|S_odd - 1|` for one barrier. `None` is the free case and gives zero.
pub fn odd_channel_null(grid: &GridSpec, packet: &WavepacketSpec, barrier: Option<&BarrierSpec>) -> Result<f64> {
    Ok((odd_channel_factor(grid, packet, barrier)? - 1.0).norm())
}
