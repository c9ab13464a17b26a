//! Crank-Nicolson time stepping of `i dpsi/dt = (-d^2/dx^2 + V) psi`.
//!
//! Space is discretized with linear finite elements. The mass matrix is the
//! average of the lumped and consistent ones, which cancels the leading
//! dispersion error: on a uniform patch the plane-wave energy is
//! `k^2 (1 + O((kh)^4))`, so spacing changes barely reflect. The potential is
//! lumped onto the nodes. With `M` and `H` Hermitian,
//! `(M + i dt/2 H) psi' = (M - i dt/2 H) psi` preserves `psi^dag M psi`
//! exactly, and its scattering matrix does not depend on `dt`: every
//! eigenmode only picks up the phase `2 atan(E dt / 2)` per step, which the
//! barrier-free twin run shares.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{gaussian, BarrierSpec, GridSpec, Mesh, WavepacketSpec};
use crate::error::{Error, Result};

/// Nodes at each edge watched for boundary contact.
pub const EDGE_NODES: usize = 10;
/// Largest probability tolerated on the edge nodes.
pub const EDGE_LIMIT: f64 = 1e-8;
/// Norm drift that aborts a run.
pub const DRIFT_ABORT: f64 = 1e-6;


/// A state on a mesh, stored as nodal values of `psi`.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    mesh: Arc<Mesh>,
    psi: Vec<Complex64>,
    /// Largest `|norm - initial norm|` seen during propagation.
    pub norm_drift: f64,
    pub elapsed: f64,
}

impl Wavefunction {
    pub fn new(mesh: Arc<Mesh>, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != mesh.len() {
            return Err(Error::invalid("psi", format!("{} values for {} nodes", psi.len(), mesh.len())));
        }
        Ok(Self { mesh, psi, norm_drift: 0.0, elapsed: 0.0 })
    }

    /// Samples `f` on the mesh and normalizes in the mass-matrix norm.
    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let psi = mesh.nodes().iter().map(|&x| f(x)).collect();
        let mut wf = Self::new(mesh, psi)?;
        let n = wf.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("psi", "initial state has zero or non-finite norm"));
        }
        let s = 1.0 / n;
        wf.psi.iter_mut().for_each(|z| *z *= s);
        Ok(wf)
    }

    pub fn packet(mesh: Arc<Mesh>, packet: &WavepacketSpec) -> Result<Self> {
        packet.validate()?;
        Self::from_fn(mesh, |x| packet.amplitude(x))
    }

    /// `psi(x) - psi(-x)` built from the packet, normalized.
    pub fn antisymmetric_packet(mesh: Arc<Mesh>, packet: &WavepacketSpec) -> Result<Self> {
        packet.validate()?;
        let p = *packet;
        Self::from_fn(mesh, move |x| gaussian(x, p.x0, p.k0, p.sigma_x) - gaussian(-x, p.x0, p.k0, p.sigma_x))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.psi
    }

    /// `sqrt(psi^dag M psi)` with the averaged mass matrix.
    pub fn norm(&self) -> f64 {
        mass_norm_sqr(&self.mesh, &self.psi).sqrt()
    }

    /// Lumped probability on the nodes with `pred(x)` true.
    pub fn probability_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        let m = &self.mesh;
        m.nodes()
            .iter()
            .zip(m.weights())
            .zip(&self.psi)
            .filter(|((x, _), _)| pred(**x))
            .map(|((_, w), z)| w * z.norm_sqr())
            .sum()
    }

    /// Lumped probability on the outermost [`EDGE_NODES`] nodes at each end.
    pub fn edge_probability(&self) -> f64 {
        let n = self.psi.len();
        let w = self.mesh.weights();
        (0..EDGE_NODES).chain(n - EDGE_NODES..n).map(|j| w[j] * self.psi[j].norm_sqr()).sum()
    }

    /// `sum_j psi_j exp(-i q x_j) w_j`, the lattice Fourier transform.
    pub fn fourier(&self, q: f64) -> Complex64 {
        self.fourier_where(q, |_| true)
    }

    /// As [`Self::fourier`], restricted to nodes satisfying `pred`.
    pub fn fourier_where(&self, q: f64, pred: impl Fn(f64) -> bool) -> Complex64 {
        let m = &self.mesh;
        m.nodes()
            .iter()
            .zip(m.weights())
            .zip(&self.psi)
            .filter(|((x, _), _)| pred(**x))
            .map(|((x, w), z)| z * Complex64::from_polar(*w, -q * x))
            .sum()
    }

    /// Max `|psi(x) - psi(-x)|` relative to max `|psi|`. Needs a mirror-symmetric mesh.
    pub fn parity_asymmetry(&self) -> f64 {
        let n = self.psi.len();
        let peak = self.psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let worst = (0..n / 2).map(|j| (self.psi[j] - self.psi[n - 1 - j]).norm()).fold(0.0, f64::max);
        worst / peak
    }

    /// Mean momentum from the transform on `[-q_max, q_max]` with `samples` trapezoid nodes.
    pub fn mean_momentum(&self, q_max: f64, samples: usize) -> f64 {
        let dq = 2.0 * q_max / (samples - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..samples {
            let q = -q_max + i as f64 * dq;
            let wt = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
            let p = self.fourier(q).norm_sqr() * wt;
            num += q * p;
            den += p;
        }
        num / den
    }
}

fn mass_norm_sqr(mesh: &Mesh, psi: &[Complex64]) -> f64 {
    let s = mesh.spacing();
    let n = psi.len();
    let mut acc = 0.0;
    for j in 0..n {
        acc += 5.0 / 12.0 * (s[j] + s[j + 1]) * psi[j].norm_sqr();
        if j + 1 < n {
            acc += 2.0 / 12.0 * s[j + 1] * (psi[j].conj() * psi[j + 1]).re;
        }
    }
    acc
}

/// Factorized Crank-Nicolson stepper for one mesh, potential and `dt`.
pub struct Propagator {
    /// Right-hand-side diagonal and off-diagonal, `M - i dt/2 H`.
    rhs_diag: Vec<Complex64>,
    rhs_off: Vec<Complex64>,
    /// Left-hand off-diagonal, `M + i dt/2 H`, and its Thomas factors.
    lhs_off: Vec<Complex64>,
    upper: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    scratch: Vec<Complex64>,
    pub dt: f64,
}

impl Propagator {
    pub fn new(mesh: &Mesh, potential: &[f64], dt: f64) -> Result<Self> {
        let n = mesh.len();
        if potential.len() != n {
            return Err(Error::invalid("potential", "length differs from the mesh"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        let s = mesh.spacing();
        let w = mesh.weights();
        let tau = 0.5 * dt;
        let mut rhs_diag = Vec::with_capacity(n);
        let mut lhs_diag = Vec::with_capacity(n);
        let mut rhs_off = Vec::with_capacity(n - 1);
        let mut lhs_off = Vec::with_capacity(n - 1);
        for j in 0..n {
            let m = 5.0 / 12.0 * (s[j] + s[j + 1]);
            let h = 1.0 / s[j] + 1.0 / s[j + 1] + w[j] * potential[j];
            rhs_diag.push(Complex64::new(m, -tau * h));
            lhs_diag.push(Complex64::new(m, tau * h));
            if j + 1 < n {
                let m = s[j + 1] / 12.0;
                let h = -1.0 / s[j + 1];
                rhs_off.push(Complex64::new(m, -tau * h));
                lhs_off.push(Complex64::new(m, tau * h));
            }
        }
        let mut upper = vec![Complex64::from(0.0); n];
        let mut inv_pivot = vec![Complex64::from(0.0); n];
        inv_pivot[0] = 1.0 / lhs_diag[0];
        for j in 1..n {
            upper[j - 1] = lhs_off[j - 1] * inv_pivot[j - 1];
            inv_pivot[j] = 1.0 / (lhs_diag[j] - lhs_off[j - 1] * upper[j - 1]);
        }
        Ok(Self { rhs_diag, rhs_off, lhs_off, upper, inv_pivot, scratch: vec![Complex64::from(0.0); n], dt })
    }

    /// One step in place.
    pub fn step(&mut self, psi: &mut [Complex64]) {
        let n = psi.len();
        let d = &mut self.scratch;
        // forward sweep fused with the right-hand side
        for j in 0..n {
            let mut r = self.rhs_diag[j] * psi[j];
            if j > 0 {
                r += self.rhs_off[j - 1] * psi[j - 1];
            }
            if j + 1 < n {
                r += self.rhs_off[j] * psi[j + 1];
            }
            if j > 0 {
                r -= self.lhs_off[j - 1] * d[j - 1];
            }
            d[j] = r * self.inv_pivot[j];
        }
        psi[n - 1] = d[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = d[j] - self.upper[j] * psi[j + 1];
        }
    }

    /// Runs `n_steps`, enforcing the edge and drift limits.
    pub fn run(&mut self, wf: &mut Wavefunction, n_steps: usize) -> Result<()> {
        let norm0 = mass_norm_sqr(&wf.mesh, &wf.psi).sqrt();
        check_edges(wf, 0)?;
        for step in 1..=n_steps {
            self.step(&mut wf.psi);
            check_edges(wf, step)?;
            if step % 64 == 0 || step == n_steps {
                let drift = (wf.norm() - norm0).abs();
                wf.norm_drift = wf.norm_drift.max(drift);
                if !(drift <= DRIFT_ABORT) {
                    return Err(Error::NormDrift { drift, limit: DRIFT_ABORT, step });
                }
            }
        }
        wf.elapsed += self.dt * n_steps as f64;
        Ok(())
    }
}

fn check_edges(wf: &Wavefunction, step: usize) -> Result<()> {
    let probability = wf.edge_probability();
    if !(probability <= EDGE_LIMIT) {
        return Err(Error::BoundaryContact { probability, step });
    }
    Ok(())
}

/// Evolves `initial` on its own mesh for the grid's step count.
pub fn propagate_state(grid: &GridSpec, initial: Wavefunction, barrier: Option<&BarrierSpec>) -> Result<Wavefunction> {
    grid.validate()?;
    let mesh = initial.mesh.clone();
    let potential = match barrier {
        Some(b) => b.sample(&mesh)?,
        None => vec![0.0; mesh.len()],
    };
    let mut prop = Propagator::new(&mesh, &potential, grid.dt)?;
    let mut wf = initial;
    prop.run(&mut wf, grid.n_steps)?;
    Ok(wf)
}

/// Builds the mesh, places the packet and evolves it; `None` is the free run.
pub fn propagate(grid: &GridSpec, packet: &WavepacketSpec, barrier: Option<&BarrierSpec>) -> Result<Wavefunction> {
    packet.validate()?;
    if let Some(b) = barrier {
        b.validate()?;
        b.check_against(packet.k0)?;
    }
    let mesh = Arc::new(Mesh::build(grid)?);
    propagate_state(grid, Wavefunction::packet(mesh, packet)?, barrier)
}
