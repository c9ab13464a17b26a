//! Gate fidelity under a Gaussian spread of the total momentum.
//!
//! The averaged channel is `rho -> E_p[U(p) rho U(p)^dag]` with
//! `p ~ N(p_a + p_b, delta_p^2)`. Its average gate fidelity against the
//! central gate `U0` is `(E_p|tr(U0^dag U(p))|^2 + d) / (d^2 + d)` with `d = 4`.
//! The expectation is taken with Gauss-Hermite quadrature.

use serde::Serialize;

use crate::error::{require_finite, Error, Result};
use crate::smatrix::{CollisionConfig, Coupling, GateFamily};

/// Doubling the order may move the fidelity by at most this much.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// `delta_p` must stay below this fraction of the total momentum.
pub const MAX_RELATIVE_SPREAD: f64 = 0.3;

const DIM: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadFidelity {
    pub fidelity: f64,
    pub infidelity: f64,
}

/// Nodes and weights for `int f(x) exp(-x^2) dx`, by Newton iteration on the
/// orthonormal Hermite recurrence. Nodes are returned in decreasing order.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 200 {
        return Err(Error::invalid("quadrature_order", format!("must lie in 1..=200, got {n}")));
    }
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

fn mean_trace_overlap(cfg: &CollisionConfig, delta_p: f64, family: GateFamily, order: usize) -> Result<f64> {
    let (nodes, weights) = gauss_hermite(order)?;
    let p0 = cfg.total_momentum();
    let c = cfg.coupling();
    let u0 = family.gate_at(p0, c);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let p = p0 + std::f64::consts::SQRT_2 * delta_p * x;
        let u = family.gate_at(p, c);
        let tr = (u0.matrix().adjoint() * u.matrix()).trace();
        acc += w * tr.norm_sqr();
    }
    Ok(acc / sqrt_pi)
}

/// Average gate fidelity of the momentum-averaged channel against the
/// central gate. Rejects orders whose doubled counterpart disagrees.
pub fn spread_averaged_gate(
    cfg: &CollisionConfig,
    delta_p: f64,
    family: GateFamily,
    quadrature_order: usize,
) -> Result<SpreadFidelity> {
    require_finite("delta_p", delta_p)?;
    if delta_p < 0.0 {
        return Err(Error::invalid("delta_p", "must be non-negative"));
    }
    let p0 = cfg.total_momentum();
    if !(delta_p < MAX_RELATIVE_SPREAD * p0) {
        return Err(Error::invalid("delta_p", format!("must be below {MAX_RELATIVE_SPREAD} * (p_a + p_b) = {}", MAX_RELATIVE_SPREAD * p0)));
    }
    // No dependence on p: either no interaction or the impenetrable limit.
    if delta_p == 0.0 || cfg.coupling() == Coupling::Infinite || cfg.coupling().is_zero() {
        return Ok(SpreadFidelity { fidelity: 1.0, infidelity: 0.0 });
    }
    let base = mean_trace_overlap(cfg, delta_p, family, quadrature_order)?;
    let doubled = mean_trace_overlap(cfg, delta_p, family, 2 * quadrature_order)?;
    let fid = |m: f64| (m + DIM) / (DIM * DIM + DIM);
    let change = (fid(base) - fid(doubled)).abs();
    if !(change <= QUADRATURE_TOL) {
        return Err(Error::QuadratureNotConverged { order: quadrature_order, doubled: 2 * quadrature_order, change });
    }
    let infidelity = (DIM * DIM - doubled) / (DIM * DIM + DIM);
    Ok(SpreadFidelity { fidelity: 1.0 - infidelity, infidelity })
}
