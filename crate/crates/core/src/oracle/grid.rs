//! Spatial meshes, initial packets and regularized barriers.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_finite, Error, Result};

/// Smallest accepted node count.
pub const MIN_POINTS: usize = 4096;

/// Local refinement around the origin: uniform spacing `fine_spacing` for
/// `|x| < fine_half_width`, then growth up to the coarse spacing, which is
/// solved for so the mesh fills the domain.
///
/// Spacing changes reflect. On a graded mesh the scheme carries an effective
/// potential of about `i k^3 (h^2)' / 12`, so the reflection at wavenumber
/// `k` is roughly `k^2 / 24` times the Fourier transform of `(h^2)'` at `2k`.
/// Two stages keep that small:
///
/// * geometric growth by `growth` per cell up to `onset_spacing`, short
///   enough to act as a point scatterer of strength `(k h_onset)^2 / 24`;
/// * `h^2` then follows a Gaussian-smoothed ramp of scale `ramp_length` to
///   the coarse value, whose transform at `2k` falls like
///   `exp(-2 k^2 ramp_length^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refinement {
    pub fine_spacing: f64,
    pub fine_half_width: f64,
    pub growth: f64,
    pub onset_spacing: f64,
    pub ramp_length: f64,
}

/// Discretization of the relative coordinate and the time axis.
///
/// `x_min` and `x_max` are Dirichlet walls; the `n_points` unknowns sit strictly
/// inside. Without refinement the nodes are uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub refinement: Option<Refinement>,
}

impl GridSpec {
    pub fn uniform(x_min: f64, x_max: f64, n_points: usize, dt: f64, n_steps: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n_points, dt, n_steps, refinement: None };
        g.validate()?;
        Ok(g)
    }

    pub fn refined(half_length: f64, n_points: usize, dt: f64, n_steps: usize, refinement: Refinement) -> Result<Self> {
        let g = Self { x_min: -half_length, x_max: half_length, n_points, dt, n_steps, refinement: Some(refinement) };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("x_min", self.x_min)?;
        require_finite("x_max", self.x_max)?;
        require_finite("dt", self.dt)?;
        if !(self.x_max > self.x_min) {
            return Err(Error::invalid("x_max", "must exceed x_min"));
        }
        if self.n_points < MIN_POINTS {
            return Err(Error::invalid("n_points", format!("need at least {MIN_POINTS}, got {}", self.n_points)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if self.n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1"));
        }
        if let Some(r) = self.refinement {
            if self.x_min != -self.x_max {
                return Err(Error::invalid("refinement", "refined meshes must be symmetric about 0"));
            }
            if self.n_points % 2 != 0 {
                return Err(Error::invalid("n_points", "refined meshes need an even count"));
            }
            for (name, v) in
                [
                    ("fine_spacing", r.fine_spacing),
                    ("fine_half_width", r.fine_half_width),
                    ("onset_spacing", r.onset_spacing),
                    ("ramp_length", r.ramp_length),
                ]
            {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(name, format!("must be positive, got {v}")));
                }
            }
            if !(r.growth > 1.0 && r.growth < 2.0) {
                return Err(Error::invalid("growth", format!("must lie in (1, 2), got {}", r.growth)));
            }
            if r.fine_half_width >= self.x_max {
                return Err(Error::invalid("fine_half_width", "refined zone exceeds the domain"));
            }
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// `dt * k_max^2` with `k_max = pi / h` for the mean spacing `h`.
    ///
    /// Crank-Nicolson is stable for any value; this is reported, not enforced.
    pub fn cfl_number(&self) -> f64 {
        let k_max = std::f64::consts::PI * self.n_points as f64 / (self.x_max - self.x_min);
        self.dt * k_max * k_max
    }
}

/// Node positions with the spacings to each neighbour.
///
/// `spacing[j]` is `x_j - x_{j-1}`, with `x_{-1} = x_min` and `x_n = x_max`,
/// so it has `n + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    x: Vec<f64>,
    spacing: Vec<f64>,
    weight: Vec<f64>,
    x_min: f64,
    x_max: f64,
}

impl Mesh {
    pub fn build(grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let x = match grid.refinement {
            None => {
                let h = (grid.x_max - grid.x_min) / (grid.n_points + 1) as f64;
                (0..grid.n_points).map(|j| grid.x_min + (j + 1) as f64 * h).collect()
            }
            Some(r) => refined_nodes(grid.x_max, grid.n_points, r)?,
        };
        Ok(Self::from_nodes(x, grid.x_min, grid.x_max))
    }

    fn from_nodes(x: Vec<f64>, x_min: f64, x_max: f64) -> Self {
        let n = x.len();
        let mut spacing = Vec::with_capacity(n + 1);
        spacing.push(x[0] - x_min);
        spacing.extend(x.windows(2).map(|w| w[1] - w[0]));
        spacing.push(x_max - x[n - 1]);
        let weight = (0..n).map(|j| 0.5 * (spacing[j] + spacing[j + 1])).collect();
        Self { x, spacing, weight, x_min, x_max }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Quadrature weight of each node (half the sum of adjacent spacings).
    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }
}

/// Ramp of `h^2` in units of its scale: starts this many scales before the
/// midpoint of the rise, where its slope is below 1e-4 of the peak.
const RAMP_START: f64 = -4.0;
/// Width of the rise of `(h^2)'`, in ramp scales.
const RAMP_SPAN: f64 = 1.5;

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Integral of the normal CDF.
fn cdf_integral(z: f64) -> f64 {
    z * normal_cdf(z) + normal_pdf(z)
}

/// Smooth step from 0 to 1: the normal CDF convolved with a box of width `RAMP_SPAN`.
fn smooth_step(z: f64) -> f64 {
    ((cdf_integral(z) - cdf_integral(z - RAMP_SPAN)) / RAMP_SPAN).clamp(0.0, 1.0)
}

fn march(x_max: f64, half: usize, r: Refinement, coarse: f64) -> Vec<f64> {
    let onset = r.onset_spacing.max(r.fine_spacing).min(coarse);
    let (o2, c2) = (onset * onset, coarse * coarse);
    let profile = |x: f64, x_on: f64| (o2 + (c2 - o2) * smooth_step((x - x_on) / r.ramp_length + RAMP_START)).sqrt();
    let mut out = Vec::with_capacity(half);
    let mut x = 0.5 * r.fine_spacing;
    let mut h = r.fine_spacing;
    let mut ramp_from: Option<f64> = None;
    for _ in 0..half {
        out.push(x);
        if x + 0.5 * r.fine_spacing > r.fine_half_width {
            match ramp_from {
                None => {
                    h = (h * r.growth).min(onset);
                    if h >= onset {
                        ramp_from = Some(x);
                    }
                }
                Some(x_on) => {
                    // spacing taken at the cell midpoint
                    let mut next = h;
                    for _ in 0..3 {
                        next = profile(x + 0.5 * next, x_on);
                    }
                    h = next.min(coarse);
                }
            }
        }
        x += h;
        if x > 2.0 * x_max {
            break;
        }
    }
    out
}

fn refined_nodes(x_max: f64, n: usize, r: Refinement) -> Result<Vec<f64>> {
    let half = n / 2;
    // Position of the wall implied by a coarse spacing; monotone in it.
    let reach = |coarse: f64| {
        let xs = march(x_max, half, r, coarse);
        if xs.len() < half {
            return f64::INFINITY;
        }
        let last = xs[half - 1];
        let prev = xs[half - 2];
        last + (last - prev)
    };
    let (mut lo, mut hi) = (r.fine_spacing, x_max);
    if reach(lo) > x_max {
        return Err(Error::invalid(
            "n_points",
            format!("{n} points overfill the domain at the fine spacing; widen the domain or coarsen the refinement"),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reach(mid) > x_max {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let right = march(x_max, half, r, lo);
    let mut x: Vec<f64> = right.iter().rev().map(|v| -v).collect();
    x.extend_from_slice(&right);
    Ok(x)
}

/// Gaussian packet `(2 pi s^2)^(-1/4) exp(-(x - x0)^2 / (4 s^2) + i k0 x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavepacketSpec {
    pub x0: f64,
    pub k0: f64,
    pub sigma_x: f64,
}

impl WavepacketSpec {
    pub fn new(x0: f64, k0: f64, sigma_x: f64) -> Result<Self> {
        let p = Self { x0, k0, sigma_x };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("x0", self.x0)?;
        require_finite("k0", self.k0)?;
        require_finite("sigma_x", self.sigma_x)?;
        if !(self.k0 > 0.0) {
            return Err(Error::invalid("k0", "must be positive"));
        }
        if !(self.sigma_x > 0.0) {
            return Err(Error::invalid("sigma_x", "must be positive"));
        }
        if !(self.k0 * self.sigma_x > 10.0) {
            return Err(Error::invalid("sigma_x", format!("k0 * sigma_x = {} must exceed 10", self.k0 * self.sigma_x)));
        }
        if !(self.x0 < 0.0 && self.x0.abs() > 5.0 * self.sigma_x) {
            return Err(Error::invalid("x0", "packet must start left of the barrier, more than 5 widths away"));
        }
        Ok(())
    }

    /// Momentum spread `1 / (2 sigma_x)`.
    pub fn delta_k(&self) -> f64 {
        0.5 / self.sigma_x
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        gaussian(x, self.x0, self.k0, self.sigma_x)
    }
}

pub(crate) fn gaussian(x: f64, x0: f64, k0: f64, sigma: f64) -> Complex64 {
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let d = x - x0;
    Complex64::from_polar(norm * (-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierShape {
    Square,
    Gaussian,
}

impl std::str::FromStr for BarrierShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(Self::Square),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(Error::invalid("shape", format!("expected square or gaussian, got {s:?}"))),
        }
    }
}

/// Finite-width stand-in for `c delta(x)` with area `strength`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSpec {
    pub strength: f64,
    pub width: f64,
    pub shape: BarrierShape,
}

impl BarrierSpec {
    pub fn new(strength: f64, width: f64, shape: BarrierShape) -> Result<Self> {
        let b = Self { strength, width, shape };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength > 0.0 && self.strength.is_finite()) {
            return Err(Error::invalid("strength", format!("must be positive, got {}", self.strength)));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::invalid("width", format!("must be positive, got {}", self.width)));
        }
        Ok(())
    }

    /// The delta limit is only probed when `width * k0 <= 1/20`.
    pub fn check_against(&self, k0: f64) -> Result<()> {
        if self.width * k0 > 0.05 + 1e-12 {
            return Err(Error::invalid(
                "width",
                format!("width * k0 = {:.3e} too large for the contact limit (need <= 0.05)", self.width * k0),
            ));
        }
        Ok(())
    }

    /// Half extent of the support. The gaussian has standard deviation
    /// `width / sqrt(12)` (same second moment as the square) and is cut at 6 sd.
    pub fn half_extent(&self) -> f64 {
        match self.shape {
            BarrierShape::Square => 0.5 * self.width,
            BarrierShape::Gaussian => 6.0 * self.gaussian_sd(),
        }
    }

    fn gaussian_sd(&self) -> f64 {
        self.width / 12f64.sqrt()
    }

    /// Nodal potential, rescaled so `sum V_j w_j` equals `strength` exactly.
    pub fn sample(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        let half = self.half_extent();
        let sd = self.gaussian_sd();
        let mut v: Vec<f64> = mesh
            .nodes()
            .iter()
            .map(|&x| {
                if x.abs() >= half {
                    0.0
                } else {
                    match self.shape {
                        BarrierShape::Square => 1.0,
                        BarrierShape::Gaussian => (-0.5 * (x / sd).powi(2)).exp(),
                    }
                }
            })
            .collect();
        let support = v.iter().filter(|&&s| s > 0.0).count();
        if support < 8 {
            return Err(Error::invalid(
                "width",
                format!("barrier covers {support} nodes; at least 8 are needed to resolve it"),
            ));
        }
        let area: f64 = v.iter().zip(mesh.weights()).map(|(a, w)| a * w).sum();
        let scale = self.strength / area;
        v.iter_mut().for_each(|a| *a *= scale);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn refined() -> GridSpec {
        let r = Refinement { fine_spacing: 1e-3, fine_half_width: 0.05, growth: 1.1, onset_spacing: 2e-3, ramp_length: 2.0 };
        GridSpec::refined(100.0, 4096, 0.05, 10, r).unwrap()
    }

    #[test]
    fn uniform_mesh_spacing() {
        let g = GridSpec::uniform(-10.0, 10.0, 4096, 0.01, 1).unwrap();
        let m = Mesh::build(&g).unwrap();
        let h = 20.0 / 4097.0;
        assert_eq!(m.len(), 4096);
        assert!(m.spacing().iter().all(|s| (s - h).abs() < 1e-12));
        assert_relative_eq!(m.weights().iter().sum::<f64>(), 20.0 - h, max_relative = 1e-12);
    }

    #[test]
    fn refined_mesh_is_symmetric_and_fills_domain() {
        let m = Mesh::build(&refined()).unwrap();
        let x = m.nodes();
        let n = x.len();
        for j in 0..n / 2 {
            assert_eq!(x[j], -x[n - 1 - j]);
        }
        assert_relative_eq!(m.spacing()[n], m.spacing()[n - 1], max_relative = 1e-6);
        assert_relative_eq!(m.min_spacing(), 1e-3, max_relative = 1e-12);
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        // neighbouring cells never grow by more than the growth factor
        let s = &m.spacing()[1..n];
        assert!(s.windows(2).all(|w| w[1] / w[0] < 1.1 + 1e-9 && w[0] / w[1] < 1.1 + 1e-9));
        // spacing never shrinks on the way out
        let right = &m.spacing()[n / 2 + 1..n];
        assert!(right.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }

    #[test]
    fn smooth_step_limits() {
        assert!(smooth_step(RAMP_START) < 1e-4);
        assert_eq!(smooth_step(10.0), 1.0);
        assert_relative_eq!(smooth_step(0.5 * RAMP_SPAN), 0.5, max_relative = 1e-12);
        let zs: Vec<f64> = (0..200).map(|i| -6.0 + 0.06 * i as f64).collect();
        assert!(zs.windows(2).all(|z| smooth_step(z[1]) >= smooth_step(z[0])));
    }

    #[test]
    fn refined_mesh_rejects_overfill() {
        let r = Refinement { fine_spacing: 1.0, fine_half_width: 0.5, growth: 1.1, onset_spacing: 2e-3, ramp_length: 2.0 };
        let g = GridSpec::refined(100.0, 4096, 0.05, 10, r).unwrap();
        assert!(Mesh::build(&g).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::uniform(-1.0, 1.0, 100, 0.1, 1).is_err());
        assert!(GridSpec::uniform(1.0, -1.0, 4096, 0.1, 1).is_err());
        assert!(GridSpec::uniform(-1.0, 1.0, 4096, 0.0, 1).is_err());
        assert!(GridSpec::uniform(-1.0, 1.0, 4096, 0.1, 0).is_err());
        let r = Refinement { fine_spacing: 1e-3, fine_half_width: 0.05, growth: 1.1, onset_spacing: 2e-3, ramp_length: 2.0 };
        assert!(GridSpec { x_min: -1.0, x_max: 2.0, n_points: 4096, dt: 0.1, n_steps: 1, refinement: Some(r) }
            .validate()
            .is_err());
    }

    #[test]
    fn packet_invariants() {
        assert!(WavepacketSpec::new(-80.0, 1.0, 10.5).is_ok());
        assert!(WavepacketSpec::new(-80.0, 1.0, 9.0).is_err());
        assert!(WavepacketSpec::new(-40.0, 1.0, 10.5).is_err());
        assert!(WavepacketSpec::new(80.0, 1.0, 10.5).is_err());
        assert!(WavepacketSpec::new(-80.0, -1.0, 10.5).is_err());
        assert_eq!(WavepacketSpec::new(-80.0, 1.0, 12.5).unwrap().delta_k(), 0.04);
    }

    #[test]
    fn packet_is_normalized() {
        let p = WavepacketSpec::new(-80.0, 1.0, 10.5).unwrap();
        let h = 0.01;
        let total: f64 = (-20000..20000).map(|j| p.amplitude(-80.0 + j as f64 * h).norm_sqr() * h).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn barrier_area_is_exact() {
        let m = Mesh::build(&refined()).unwrap();
        for shape in [BarrierShape::Square, BarrierShape::Gaussian] {
            let b = BarrierSpec::new(2.5, 0.02, shape).unwrap();
            let v = b.sample(&m).unwrap();
            let area: f64 = v.iter().zip(m.weights()).map(|(a, w)| a * w).sum();
            assert_relative_eq!(area, 2.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn barrier_must_be_resolved_and_narrow() {
        let m = Mesh::build(&refined()).unwrap();
        let b = BarrierSpec::new(1.0, 0.004, BarrierShape::Square).unwrap();
        assert!(b.sample(&m).is_err());
        assert!(BarrierSpec::new(1.0, 0.1, BarrierShape::Square).unwrap().check_against(1.0).is_err());
        assert!(BarrierSpec::new(1.0, 0.05, BarrierShape::Square).unwrap().check_against(1.0).is_ok());
        assert!(BarrierSpec::new(0.0, 0.05, BarrierShape::Square).is_err());
        assert!(BarrierSpec::new(1.0, -0.05, BarrierShape::Square).is_err());
    }

    #[test]
    fn shape_parsing() {
        assert_eq!("Gaussian".parse::<BarrierShape>().unwrap(), BarrierShape::Gaussian);
        assert!("triangle".parse::<BarrierShape>().is_err());
    }
}
