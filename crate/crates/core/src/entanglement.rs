//! Entanglement diagnostics for two-qubit gates: pure-state concurrence,
//! Makhlin local invariants, Monte-Carlo entangling power and the momentum
//! sweep that locates the most entangling collision.
//!
//! Entangling power here is the mean squared concurrence of `U |a>|b>` over
//! Haar-random single-qubit states `|a>`, `|b>`. For pure two-qubit states
//! `C^2 = 2 (1 - tr rho_A^2)`, so this is twice the linear-entropy entangling
//! power; its maximum over all gates is 4/9 (reached by CNOT and CZ).

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gate::{apply, Basis, TwoQubitGate, TwoQubitState};
use crate::smatrix::{CollisionConfig, GateFamily};

/// Norm deviation tolerated by [`concurrence`].
pub const CONCURRENCE_NORM_TOL: f64 = 1e-9;
/// Default absolute tolerance for [`locally_equivalent`].
pub const LOCAL_EQUIVALENCE_TOL: f64 = 1e-8;
/// Largest mean squared concurrence any two-qubit gate can reach.
pub const MAX_ENTANGLING_POWER: f64 = 4.0 / 9.0;
/// Minimum Monte-Carlo sample count for [`entangling_power`].
pub const MIN_SAMPLES: usize = 1000;

const CHUNK: usize = 4096;

/// `C = 2 |a00 a11 - a01 a10|` for a normalized pure state.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let deviation = (state.norm() - 1.0).abs();
    if !(deviation <= CONCURRENCE_NORM_TOL) {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(raw_concurrence(&state.amplitudes()).min(1.0))
}

fn raw_concurrence(a: &[Complex64; 4]) -> f64 {
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// Makhlin invariants `(G1, G2)`; two gates are locally equivalent iff
/// their invariants coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MakhlinInvariants {
    pub g1: Complex64,
    pub g2: f64,
}

impl MakhlinInvariants {
    /// Largest componentwise distance (re G1, im G1, G2).
    pub fn distance(&self, other: &MakhlinInvariants) -> f64 {
        [
            (self.g1.re - other.g1.re).abs(),
            (self.g1.im - other.g1.im).abs(),
            (self.g2 - other.g2).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn magic_basis() -> Matrix4<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = Complex64::new(h, 0.0);
    let i = Complex64::new(0.0, h);
    let z = Complex64::new(0.0, 0.0);
    Matrix4::new(
        r, z, z, i, //
        z, i, r, z, //
        z, i, -r, z, //
        r, z, z, -i,
    )
}

/// With `M = Q^dag U Q` in the magic basis and `m = M^T M`:
/// `G1 = tr(m)^2 / (16 det U)`, `G2 = (tr(m)^2 - tr(m^2)) / (4 det U)`.
pub fn makhlin_invariants(gate: &TwoQubitGate) -> MakhlinInvariants {
    let q = magic_basis();
    let u = gate.matrix();
    let mb = q.adjoint() * u * q;
    let m = mb.transpose() * mb;
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = (m * m).trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - tr2) / (det * 4.0);
    MakhlinInvariants { g1, g2: g2.re }
}

/// True iff the Makhlin invariants agree within `tol` per component.
pub fn locally_equivalent(x: &TwoQubitGate, y: &TwoQubitGate, tol: f64) -> bool {
    makhlin_invariants(x).distance(&makhlin_invariants(y)) <= tol
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Haar-random pure qubit from two complex Gaussians.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 2] {
    let mut v = [Complex64::new(0.0, 0.0); 2];
    for z in v.iter_mut() {
        *z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Mean squared concurrence of `gate |a>|b>` over Haar-random product
/// inputs. Samples are drawn in fixed chunks, chunk `k` from stream `k` of a
/// ChaCha8 generator seeded with `seed`, and summed in chunk order, so the
/// result is bit-identical for any thread count.
pub fn entangling_power(gate: &TwoQubitGate, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("need at least {MIN_SAMPLES} samples, got {samples}"),
        ));
    }
    let m = *gate.matrix();
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let a = haar_qubit(&mut rng);
                let b = haar_qubit(&mut rng);
                let input = nalgebra::Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
                let out = m * input;
                let c2 = raw_concurrence(&[out[0], out[1], out[2], out[3]]).powi(2);
                s1 += c2;
                s2 += c2 * c2;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(Estimate { mean, stderr: (var / n).sqrt() })
}

/// Largest output concurrence over the four computational basis inputs.
pub fn max_basis_concurrence(gate: &TwoQubitGate) -> f64 {
    Basis::ALL
        .iter()
        .map(|&b| raw_concurrence(&apply(gate, &TwoQubitState::basis(b)).amplitudes()).min(1.0))
        .fold(0.0, f64::max)
}

/// One row of an optimality sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    /// `(p_a + p_b) / c`.
    pub ratio: f64,
    /// Mean squared concurrence divided by [`MAX_ENTANGLING_POWER`].
    pub entangling_power: f64,
    /// Standard error of `entangling_power`, same normalization.
    pub stderr: f64,
    pub max_concurrence: f64,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "ratio,entangling_power,stderr,max_concurrence";
}

/// Entangling power and best basis-input concurrence at each ratio
/// `(p_a + p_b) / c`, using symmetric launches at `c = 1`. Every ratio uses
/// the same random stream (common random numbers), so neighbouring rows
/// differ only through the gate.
pub fn optimality_sweep(
    ratios: &[f64],
    samples: usize,
    seed: u64,
    family: GateFamily,
) -> Result<Vec<SweepResult>> {
    if ratios.is_empty() {
        return Err(Error::invalid("ratios", "ratio list is empty"));
    }
    for w in ratios.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("ratios", format!("must be strictly increasing ({} then {})", w[0], w[1])));
        }
    }
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0) || !ratio.is_finite() {
                return Err(Error::invalid("ratios", format!("ratio must be positive and finite, got {ratio}")));
            }
            let gate = family.gate(&CollisionConfig::from_ratio(ratio, 1.0)?);
            let ep = entangling_power(&gate, samples, seed)?;
            Ok(SweepResult {
                ratio,
                entangling_power: ep.mean / MAX_ENTANGLING_POWER,
                stderr: ep.stderr / MAX_ENTANGLING_POWER,
                max_concurrence: max_basis_concurrence(&gate),
            })
        })
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}
