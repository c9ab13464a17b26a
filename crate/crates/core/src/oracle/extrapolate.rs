//! Zero-width extrapolation of regularized-barrier results.
//!
//! Amplitudes from a barrier of width `w` and fixed area expand in integer
//! powers of `w`, starting with a term of order `c w`. The polynomial through
//! all the widths is evaluated at `w = 0` with Neville's scheme, which is
//! repeated Richardson elimination for geometric widths.

use num_complex::Complex64;
use serde::Serialize;

use super::extract::ScatteringAmplitudes;
use crate::error::{Error, Result};

/// Result of an extrapolation together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolated {
    pub amplitudes: ScatteringAmplitudes,
    /// Largest change of `t` or `r` when the widest point is dropped.
    pub residual: f64,
    /// Successive differences shrink for both `t` and `r`.
    pub monotone: bool,
}

/// Value at zero of the polynomial through `(x_i, y_i)`.
pub fn neville_at_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (x[i], x[i + m]);
            p[i] = (p[i] * xj - p[i + 1] * xi) / (xj - xi);
        }
    }
    p[0]
}

/// Zero-width limit of a scalar series with the drop-one residual.
pub fn extrapolate_series(widths: &[f64], values: &[Complex64]) -> Result<(Complex64, f64, bool)> {
    check_widths(widths)?;
    if values.len() != widths.len() {
        return Err(Error::invalid("values", "one value per width is required"));
    }
    let all = neville_at_zero(widths, values);
    let finest = neville_at_zero(&widths[1..], &values[1..]);
    let diffs: Vec<f64> = values.windows(2).map(|v| (v[1] - v[0]).norm()).collect();
    let monotone = diffs.windows(2).all(|d| d[1] <= d[0]);
    Ok((all, (all - finest).norm(), monotone))
}

fn check_widths(widths: &[f64]) -> Result<()> {
    if widths.len() < 3 {
        return Err(Error::invalid("widths", format!("need at least 3, got {}", widths.len())));
    }
    if widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::invalid("widths", "must be positive and finite"));
    }
    if widths.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("widths", "must be strictly decreasing"));
    }
    Ok(())
}

/// Extrapolates `t` and `r` separately to zero width.
pub fn width_extrapolate(results: &[(f64, ScatteringAmplitudes)]) -> Result<Extrapolated> {
    let widths: Vec<f64> = results.iter().map(|(w, _)| *w).collect();
    check_widths(&widths)?;
    let k = results[0].1.k;
    if results.iter().any(|(_, a)| a.k != k) {
        return Err(Error::invalid("results", "amplitudes extracted at different momenta"));
    }
    let ts: Vec<Complex64> = results.iter().map(|(_, a)| a.t).collect();
    let rs: Vec<Complex64> = results.iter().map(|(_, a)| a.r).collect();
    let (t, res_t, mono_t) = extrapolate_series(&widths, &ts)?;
    let (r, res_r, mono_r) = extrapolate_series(&widths, &rs)?;
    Ok(Extrapolated {
        amplitudes: ScatteringAmplitudes { t, r, k },
        residual: res_t.max(res_r),
        monotone: mono_t && mono_r,
    })
}
