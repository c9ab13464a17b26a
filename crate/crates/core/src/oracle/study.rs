//! Ready-made oracle runs: grid presets, width schedules and comparison rows.
//!
//! Everything is set up at `k0 = 1`; amplitudes depend only on `c / 2k`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::extract::{even_channel_phase, extract_amplitudes, odd_channel_factor, ScatteringAmplitudes};
use super::extrapolate::{extrapolate_series, width_extrapolate, Extrapolated};
use super::grid::{BarrierShape, BarrierSpec, GridSpec, Mesh, Refinement, WavepacketSpec};
use super::propagate::{propagate_state, Wavefunction};
use super::relative::reduce_to_relative;
use crate::error::{require_finite, Error, Result};

use std::sync::Arc;

/// Post-extrapolation limit on `| |t|^2 + |r|^2 - 1 |`.
pub const EXTRAPOLATED_UNITARITY_LIMIT: f64 = 1e-6;

pub const CSV_HEADER: &str = "c_over_2k,phase_numeric,phase_analytic,abs_error,width_residual";

/// Scale of the smooth part of the mesh grading, in units of `1/k0`.
const RAMP: f64 = 2.0;
/// Spacing where the smooth grading takes over, in units of `1/k0`.
const ONSET: f64 = 2e-3;
/// Final distance of the free packet from the barrier, in its own widths.
/// The tails must clear both the barrier and the graded part of the mesh.
const SEPARATION: f64 = 10.0;

/// The eight ratios used for the standard comparison table.
pub const STANDARD_RATIOS: [f64; 8] = [0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fast,
    Accurate,
}

impl Preset {
    pub fn n_points(self) -> usize {
        match self {
            Preset::Fast => 4096,
            Preset::Accurate => 16384,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fast => "fast",
            Preset::Accurate => "accurate",
        }
    }

    fn widths(self) -> usize {
        match self {
            Preset::Fast => 4,
            Preset::Accurate => 5,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Preset::Fast),
            "accurate" => Ok(Preset::Accurate),
            _ => Err(Error::invalid("preset", format!("expected fast or accurate, got {s:?}"))),
        }
    }
}

/// Packet, grid and widths for one value of `c / 2k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSetup {
    pub c_over_2k: f64,
    pub strength: f64,
    pub packet: WavepacketSpec,
    pub grid: GridSpec,
    pub widths: Vec<f64>,
}

impl OracleSetup {
    pub fn new(c_over_2k: f64, preset: Preset) -> Result<Self> {
        Self::with_widths(c_over_2k, preset, preset.widths())
    }

    pub fn with_widths(c_over_2k: f64, preset: Preset, n_widths: usize) -> Result<Self> {
        require_finite("c_over_2k", c_over_2k)?;
        if !(c_over_2k > 0.0) {
            return Err(Error::invalid("c_over_2k", "must be positive"));
        }
        if n_widths < 3 {
            return Err(Error::invalid("n_widths", "need at least 3 widths"));
        }
        let k0 = 1.0;
        let c = 2.0 * k0 * c_over_2k;
        let sigma = 10.5 / k0;
        let x0 = -8.0 * sigma;
        let packet = WavepacketSpec::new(x0, k0, sigma)?;

        // Run until the free packet sits SEPARATION of its own widths past the barrier.
        let spread = |t: f64| sigma * (1.0 + (t / (sigma * sigma)).powi(2)).sqrt();
        let mut t = 0.0;
        while x0 + 2.0 * k0 * t < SEPARATION * spread(t) {
            t += 0.5 / k0.powi(2);
        }
        let dt = 0.05 / (k0 * k0);
        let n_steps = (t / dt).ceil() as usize;
        let end = x0 + 2.0 * k0 * dt * n_steps as f64;
        let half_length = end + 8.0 * spread(dt * n_steps as f64);

        let w_max = 0.05 / k0.max(c);
        let widths: Vec<f64> = (0..n_widths).map(|i| w_max * 0.5f64.powi(i as i32)).collect();
        let w_min = widths[n_widths - 1];
        let refinement = Refinement {
            fine_spacing: w_min / 16.0,
            fine_half_width: 2.0 * w_max,
            growth: 1.08,
            onset_spacing: ONSET / k0,
            ramp_length: RAMP / k0,
        };
        let grid = GridSpec::refined(half_length, preset.n_points(), dt, n_steps, refinement)?;
        Ok(Self { c_over_2k, strength: c, packet, grid, widths })
    }

    /// Same run on a domain scaled by `factor`; shrinking it is how boundary
    /// contact is provoked on purpose.
    pub fn with_domain_scale(&self, factor: f64) -> Result<Self> {
        require_finite("domain_scale", factor)?;
        if !(factor > 0.0) {
            return Err(Error::invalid("domain_scale", "must be positive"));
        }
        let g = &self.grid;
        let refinement = g.refinement.ok_or_else(|| Error::invalid("grid", "expected a refined grid"))?;
        let grid = GridSpec::refined(g.x_max * factor, g.n_points, g.dt, g.n_steps, refinement)?;
        Ok(Self { grid, ..self.clone() })
    }

    pub fn analytic(&self) -> ScatteringAmplitudes {
        let rel = reduce_to_relative(self.strength).expect("strength is positive");
        let k = self.packet.k0;
        ScatteringAmplitudes { t: rel.transmission(k), r: rel.reflection(k), k }
    }
}

/// Per-width amplitudes and their zero-width limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthSeries {
    pub setup: OracleSetup,
    pub shape: BarrierShape,
    pub raw: Vec<(f64, ScatteringAmplitudes)>,
    pub extrapolated: Extrapolated,
}

/// Runs the free twin and every width of `setup` on one shared mesh.
pub fn width_series(setup: &OracleSetup, shape: BarrierShape) -> Result<WidthSeries> {
    let mesh = Arc::new(Mesh::build(&setup.grid)?);
    let packet = setup.packet;
    let jobs: Vec<Option<f64>> = std::iter::once(None).chain(setup.widths.iter().map(|w| Some(*w))).collect();
    let runs: Vec<Result<Wavefunction>> = jobs
        .par_iter()
        .map(|w| {
            let barrier = w.map(|w| BarrierSpec::new(setup.strength, w, shape)).transpose()?;
            if let Some(b) = &barrier {
                b.check_against(packet.k0)?;
            }
            propagate_state(&setup.grid, Wavefunction::packet(mesh.clone(), &packet)?, barrier.as_ref())
        })
        .collect();
    let mut runs = runs.into_iter();
    let free = runs.next().expect("free run")?;
    let mut raw = Vec::with_capacity(setup.widths.len());
    for (w, run) in setup.widths.iter().zip(runs) {
        raw.push((*w, extract_amplitudes(&run?, &free, &packet)?));
    }
    let extrapolated = width_extrapolate(&raw)?;
    Ok(WidthSeries { setup: setup.clone(), shape, raw, extrapolated })
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseComparison {
    pub c_over_2k: f64,
    pub phase_numeric: f64,
    pub phase_analytic: f64,
    pub abs_error: f64,
    pub width_residual: f64,
    pub unitarity_defect: f64,
    pub monotone: bool,
}

impl OddChannelStudy {
    pub const CSV_HEADER: &'static str = "c_over_2k,extrapolated_deviation,width_residual,finest_raw_deviation";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            self.c_over_2k,
            self.extrapolated_deviation,
            self.residual,
            self.deviations.last().copied().unwrap_or(f64::NAN)
        )
    }
}

impl PhaseComparison {
    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.c_over_2k, self.phase_numeric, self.phase_analytic, self.abs_error, self.width_residual
        )
    }
}

/// Phase comparison for one series; the wrapped phase difference is reported.
pub fn compare_phase(series: &WidthSeries) -> Result<PhaseComparison> {
    let amp = series.extrapolated.amplitudes;
    let numeric = even_channel_phase(&amp)?;
    let a = series.setup.analytic();
    let analytic = (a.t + a.r).arg();
    let diff = Complex64::from_polar(1.0, numeric - analytic).arg().abs();
    Ok(PhaseComparison {
        c_over_2k: series.setup.c_over_2k,
        phase_numeric: numeric,
        phase_analytic: analytic,
        abs_error: diff,
        width_residual: series.extrapolated.residual,
        unitarity_defect: amp.unitarity_defect(),
        monotone: series.extrapolated.monotone,
    })
}

/// Comparison rows for each ratio, in input order. Ratios run in parallel.
pub fn phase_table(ratios: &[f64], preset: Preset, shape: BarrierShape) -> Result<Vec<PhaseComparison>> {
    let setups: Vec<OracleSetup> = ratios.iter().map(|&q| OracleSetup::new(q, preset)).collect::<Result<_>>()?;
    phase_table_for(&setups, shape)
}

/// As [`phase_table`] for prepared setups.
pub fn phase_table_for(setups: &[OracleSetup], shape: BarrierShape) -> Result<Vec<PhaseComparison>> {
    setups.par_iter().map(|s| compare_phase(&width_series(s, shape)?)).collect()
}

/// Fails on rows that break the post-extrapolation unitarity limit.
pub fn check_unitarity(rows: &[PhaseComparison]) -> Result<()> {
    for row in rows {
        if !(row.unitarity_defect <= EXTRAPOLATED_UNITARITY_LIMIT) {
            return Err(Error::AmplitudeUnitarity { defect: row.unitarity_defect, limit: EXTRAPOLATED_UNITARITY_LIMIT });
        }
    }
    Ok(())
}

/// Odd-channel deviations per width and after extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddChannelStudy {
    pub c_over_2k: f64,
    pub widths: Vec<f64>,
    pub deviations: Vec<f64>,
    pub extrapolated_deviation: f64,
    pub residual: f64,
}

pub fn odd_channel_study(c_over_2k: f64, preset: Preset) -> Result<OddChannelStudy> {
    odd_channel_study_for(&OracleSetup::new(c_over_2k, preset)?)
}

pub fn odd_channel_study_for(setup: &OracleSetup) -> Result<OddChannelStudy> {
    let factors: Vec<Complex64> = setup
        .widths
        .par_iter()
        .map(|&w| {
            let b = BarrierSpec::new(setup.strength, w, BarrierShape::Square)?;
            odd_channel_factor(&setup.grid, &setup.packet, Some(&b))
        })
        .collect::<Result<_>>()?;
    let (limit, residual, _) = extrapolate_series(&setup.widths, &factors)?;
    Ok(OddChannelStudy {
        c_over_2k: setup.c_over_2k,
        widths: setup.widths.clone(),
        deviations: factors.iter().map(|f| (f - 1.0).norm()).collect(),
        extrapolated_deviation: (limit - 1.0).norm(),
        residual,
    })
}
