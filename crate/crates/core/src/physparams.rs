//! Laboratory parameters to the wavenumbers used by the gate modules.
//!
//! With `H = -hbar^2/(2m) (d1^2 + d2^2) + g1d delta(x1 - x2)`, dividing by
//! `hbar^2/(2m)` gives the `2c delta` form with `c = m g1d / hbar^2`. A
//! wavenumber of `1/m` here is one natural unit in [`crate::smatrix`].
//!
//! The 1D coupling follows the harmonic-waveguide result
//! `g1d = 2 hbar omega_perp a3d / (1 - C a3d / a_perp)`, `C = 1.0326`,
//! `a_perp = sqrt(2 hbar / (m omega_perp))`.

use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Reduced Planck constant in J s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Coefficient of the confinement correction.
pub const CONFINEMENT_C: f64 = 1.0326;
/// Denominators `1 - C a/a_perp` at or below this are rejected.
pub const MIN_DENOMINATOR: f64 = 0.1;
/// Above this `a3d / a_perp` the perturbative regime is left; a warning is issued.
pub const PERTURBATIVE_LIMIT: f64 = 0.5;

/// Numerical value of `hbar` in the unit system the setup is written in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    pub hbar: f64,
}

impl Units {
    pub const SI: Units = Units { hbar: HBAR_SI };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalSetup {
    pub mass: f64,
    pub a3d: f64,
    pub omega_perp: f64,
    pub velocity: f64,
}

impl PhysicalSetup {
    /// Mass, scattering length and trap frequency must be positive; the
    /// velocity may be zero (an atom at rest has no wavenumber).
    pub fn new(mass: f64, a3d: f64, omega_perp: f64, velocity: f64) -> Result<Self> {
        let s = Self { mass, a3d, omega_perp, velocity };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass_kg", self.mass), ("a3d_m", self.a3d), ("omega_perp_rad_s", self.omega_perp)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.velocity >= 0.0 && self.velocity.is_finite()) {
            return Err(Error::invalid("velocity_m_s", format!("must be non-negative and finite, got {}", self.velocity)));
        }
        Ok(())
    }

    /// Rb-87 in a 2 pi x 100 kHz guide at 1 mm/s.
    pub fn rubidium87() -> Self {
        Self { mass: 1.443e-25, a3d: 5.0e-9, omega_perp: 2.0 * PI * 1.0e5, velocity: 1.0e-3 }
    }

    pub fn transverse_length(&self, units: &Units) -> f64 {
        (2.0 * units.hbar / (self.mass * self.omega_perp)).sqrt()
    }

    /// Human-readable notes about the regime; empty when nothing is unusual.
    pub fn warnings(&self, units: &Units) -> Vec<String> {
        let ratio = self.a3d / self.transverse_length(units);
        let mut out = Vec::new();
        if ratio > PERTURBATIVE_LIMIT {
            out.push(format!(
                "a3d / a_perp = {ratio:.3} exceeds {PERTURBATIVE_LIMIT}; the confinement correction dominates"
            ));
        }
        out
    }

    fn denominator(&self, units: &Units) -> f64 {
        1.0 - CONFINEMENT_C * self.a3d / self.transverse_length(units)
    }
}

/// `g1d` without the confinement correction, `2 hbar omega_perp a3d`.
pub fn uncorrected_g1d(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    s.validate()?;
    Ok(2.0 * units.hbar * s.omega_perp * s.a3d)
}

pub fn g1d(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    let bare = uncorrected_g1d(s, units)?;
    let denominator = s.denominator(units);
    if !(denominator > MIN_DENOMINATOR) {
        return Err(Error::ConfinementResonance { denominator });
    }
    Ok(bare / denominator)
}

fn to_wavenumber(s: &PhysicalSetup, units: &Units, g: f64) -> f64 {
    s.mass * g / (units.hbar * units.hbar)
}

/// `c = m g1d / hbar^2` in inverse length units of `units`.
pub fn coupling_with(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    Ok(to_wavenumber(s, units, g1d(s, units)?))
}

/// `c` from the uncorrected coupling.
pub fn uncorrected_coupling_with(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    Ok(to_wavenumber(s, units, uncorrected_g1d(s, units)?))
}

/// `c` in 1/m for an SI setup.
pub fn coupling_from_setup(s: &PhysicalSetup) -> Result<f64> {
    coupling_with(s, &Units::SI)
}

/// Per-atom `p = m v / hbar`.
pub fn wavenumber_with(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    s.validate()?;
    Ok(s.mass * s.velocity / units.hbar)
}

pub fn wavenumber_from_velocity(s: &PhysicalSetup) -> Result<f64> {
    wavenumber_with(s, &Units::SI)
}

/// Symmetric per-atom speed with `2 m v / hbar = c`.
pub fn optimal_velocity_with(s: &PhysicalSetup, units: &Units) -> Result<f64> {
    Ok(coupling_with(s, units)? * units.hbar / (2.0 * s.mass))
}

pub fn optimal_velocity(s: &PhysicalSetup) -> Result<f64> {
    optimal_velocity_with(s, &Units::SI)
}

/// Results for one reading of the trap frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionReport {
    pub label: &'static str,
    pub omega_perp_rad_s: f64,
    pub transverse_length_m: f64,
    pub coupling_per_m: Option<f64>,
    pub uncorrected_coupling_per_m: f64,
    pub optimal_velocity_m_s: Option<f64>,
    pub total_momentum_over_c: Option<f64>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterReport {
    pub setup: PhysicalSetup,
    pub hbar: f64,
    pub wavenumber_per_atom_per_m: f64,
    pub total_wavenumber_per_m: f64,
    /// First entry uses `omega_perp` as given; the second divides it by
    /// `2 pi`, the reading where the quoted kHz figure was an angular rate.
    pub conventions: Vec<ConventionReport>,
}

fn convention(label: &'static str, s: &PhysicalSetup, p_total: f64) -> Result<ConventionReport> {
    let units = Units::SI;
    let (coupling, error) = match coupling_with(s, &units) {
        Ok(c) => (Some(c), None),
        Err(e @ Error::ConfinementResonance { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(ConventionReport {
        label,
        omega_perp_rad_s: s.omega_perp,
        transverse_length_m: s.transverse_length(&units),
        coupling_per_m: coupling,
        uncorrected_coupling_per_m: uncorrected_coupling_with(s, &units)?,
        optimal_velocity_m_s: coupling.map(|c| c * units.hbar / (2.0 * s.mass)),
        total_momentum_over_c: coupling.map(|c| p_total / c),
        error,
        warnings: s.warnings(&units),
    })
}

/// Both trap-frequency readings and both coupling formulas.
///
/// Fails only when the setup as given is invalid or resonant; problems with
/// the alternative reading are recorded in its entry.
pub fn report(s: &PhysicalSetup) -> Result<ParameterReport> {
    coupling_from_setup(s)?;
    let p = wavenumber_from_velocity(s)?;
    let alt = PhysicalSetup { omega_perp: s.omega_perp / (2.0 * PI), ..*s };
    Ok(ParameterReport {
        setup: *s,
        hbar: HBAR_SI,
        wavenumber_per_atom_per_m: p,
        total_wavenumber_per_m: 2.0 * p,
        conventions: vec![convention("omega_perp", s, 2.0 * p)?, convention("omega_perp_over_2pi", &alt, 2.0 * p)?],
    })
}

/// Parses `key=value` lines. `#` starts a comment; blank lines are ignored.
/// All four keys are required exactly once.
pub fn parse_config(text: &str) -> Result<PhysicalSetup> {
    const KEYS: [&str; 4] = ["mass_kg", "a3d_m", "omega_perp_rad_s", "velocity_m_s"];
    let mut values: [Option<f64>; 4] = [None; 4];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)));
        };
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("line {}: `{key}` has malformed value `{}`", lineno + 1, value.trim())))?;
        if values[slot].replace(v).is_some() {
            return Err(Error::Config(format!("line {}: `{key}` given twice", lineno + 1)));
        }
    }
    let get = |i: usize| values[i].ok_or_else(|| Error::Config(format!("missing key `{}`", KEYS[i])));
    let setup = PhysicalSetup { mass: get(0)?, a3d: get(1)?, omega_perp: get(2)?, velocity: get(3)? };
    setup.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(setup)
}

pub fn load_config(path: &Path) -> Result<PhysicalSetup> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}
