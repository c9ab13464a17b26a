//! Exact two-body S-matrices for the 1D delta interaction and the gates they
//! induce on flying qubits.
//!
//! Units: `hbar = 2m = 1`, so momenta and the coupling `c` are wavenumbers.
//! Qubit A is the right-mover with momentum `p_a`, qubit B the left-mover
//! with momentum `-p_b`; the S-matrix is evaluated at `p2 = p_a`,
//! `p1 = -p_b`, so only the sum `p = p_a + p_b` enters.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_finite, Error, Result};
use crate::gate::TwoQubitGate;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Contact coupling strength. The impenetrable limit is a separate variant
/// so no arithmetic ever sees a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn finite(c: f64) -> Result<Self> {
        require_finite("c", c)?;
        if c < 0.0 {
            return Err(Error::invalid("c", format!("coupling must be non-negative, got {c}")));
        }
        Ok(Coupling::Finite(c))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Coupling::Finite(c) => Some(c),
            Coupling::Infinite => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Coupling::Finite(0.0)
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" => Ok(Coupling::Infinite),
            other => {
                let c: f64 = other
                    .parse()
                    .map_err(|_| Error::invalid("c", format!("cannot parse `{other}` as a coupling")))?;
                Coupling::finite(c)
            }
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Finite(c) => write!(f, "{c}"),
            Coupling::Infinite => f.write_str("inf"),
        }
    }
}

/// Momentum magnitudes of the two counter-propagating qubits and the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionConfig {
    p_a: f64,
    p_b: f64,
    c: Coupling,
}

impl CollisionConfig {
    pub fn new(p_a: f64, p_b: f64, c: Coupling) -> Result<Self> {
        for (name, p) in [("p_a", p_a), ("p_b", p_b)] {
            require_finite(name, p)?;
            if p <= 0.0 {
                return Err(Error::invalid(name, format!("momentum magnitude must be positive, got {p}")));
            }
        }
        if let Coupling::Finite(c) = c {
            Coupling::finite(c)?;
        }
        Ok(Self { p_a, p_b, c })
    }

    /// Symmetric launch `p_a = p_b = ratio * c / 2` at coupling `c`.
    pub fn from_ratio(ratio: f64, c: f64) -> Result<Self> {
        Self::new(ratio * c / 2.0, ratio * c / 2.0, Coupling::finite(c)?)
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn coupling(&self) -> Coupling {
        self.c
    }

    /// `p2 - p1 = p_a + p_b`.
    pub fn total_momentum(&self) -> f64 {
        self.p_a + self.p_b
    }

    /// `(p_a + p_b) / c`; infinite coupling gives zero.
    pub fn ratio(&self) -> f64 {
        match self.c {
            Coupling::Finite(c) => self.total_momentum() / c,
            Coupling::Infinite => 0.0,
        }
    }
}

/// Momentum-magnitude encoding of a spinless boson: `|0> = lambda0`,
/// `|1> = lambda1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinlessEncoding {
    lambda0: f64,
    lambda1: f64,
}

impl SpinlessEncoding {
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self> {
        require_finite("lambda0", lambda0)?;
        require_finite("lambda1", lambda1)?;
        if lambda0 <= 0.0 {
            return Err(Error::invalid("lambda0", format!("must be positive, got {lambda0}")));
        }
        if lambda1 <= lambda0 {
            return Err(Error::invalid(
                "lambda1",
                format!("must exceed lambda0 = {lambda0}, got {lambda1}"),
            ));
        }
        Ok(Self { lambda0, lambda1 })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    fn lambda(&self, bit: usize) -> f64 {
        if bit == 0 {
            self.lambda0
        } else {
            self.lambda1
        }
    }

    /// `(lambda0 / c, c / lambda1)`; both should be small for the ideal gate.
    pub fn hierarchy(&self, c: f64) -> (f64, f64) {
        (self.lambda0 / c, c / self.lambda1)
    }
}

/// The spin-carrying gate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateFamily {
    Boson,
    Fermion,
}

impl GateFamily {
    pub fn gate(self, cfg: &CollisionConfig) -> TwoQubitGate {
        match self {
            GateFamily::Boson => boson_gate(cfg),
            GateFamily::Fermion => fermion_gate(cfg),
        }
    }

    /// Gate at total momentum `p` (any real value) and finite coupling `c`.
    /// Used by momentum averaging, where quadrature nodes may leave `p > 0`.
    pub(crate) fn gate_at(self, p: f64, c: Coupling) -> TwoQubitGate {
        match self {
            GateFamily::Boson => spin_gate(p, c, -1.0),
            GateFamily::Fermion => spin_gate(p, c, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateFamily::Boson => "boson",
            GateFamily::Fermion => "fermion",
        }
    }
}

impl FromStr for GateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boson" => Ok(GateFamily::Boson),
            "fermion" => Ok(GateFamily::Fermion),
            other => Err(Error::invalid("family", format!("unknown gate family `{other}`"))),
        }
    }
}

/// Lieb-Liniger two-body phase `(p2 - p1 - ic) / (p2 - p1 + ic)` for `p2 > p1`.
pub fn lieb_liniger_phase(p2: f64, p1: f64, c: Coupling) -> Result<Complex64> {
    require_finite("p2", p2)?;
    require_finite("p1", p1)?;
    if p2 <= p1 {
        return Err(Error::invalid("p2", format!("requires p2 > p1, got p2 = {p2}, p1 = {p1}")));
    }
    Ok(match c {
        Coupling::Finite(c) => {
            Coupling::finite(c)?;
            phase_of(p2 - p1, c)
        }
        Coupling::Infinite => -ONE,
    })
}

fn phase_of(k: f64, c: f64) -> Complex64 {
    Complex64::new(k, -c) / Complex64::new(k, c)
}

/// Diagonal gate of the momentum-magnitude encoding with the exact
/// finite-ratio phases. `|i>_A |j>_B` picks up `S(lambda_i, -lambda_j)`.
pub fn spinless_gate(enc: &SpinlessEncoding, c: Coupling) -> Result<TwoQubitGate> {
    if let Coupling::Finite(v) = c {
        Coupling::finite(v)?;
        if v == 0.0 {
            return Err(Error::invalid("c", "spinless gate requires c > 0"));
        }
    }
    let mut diag = [ONE; 4];
    for (idx, entry) in diag.iter_mut().enumerate() {
        let (a, b) = (idx >> 1, idx & 1);
        *entry = lieb_liniger_phase(enc.lambda(a), -enc.lambda(b), c)?;
    }
    Ok(TwoQubitGate::diagonal(diag))
}

/// The `lambda0 << c << lambda1` limit: `diag(-1, 1, 1, 1)`.
pub fn spinless_gate_idealized() -> TwoQubitGate {
    TwoQubitGate::diagonal([-ONE, ONE, ONE, ONE])
}

/// Spin-carrying bosons: `(p - ic SWAP) / (p + ic)`.
pub fn boson_gate(cfg: &CollisionConfig) -> TwoQubitGate {
    spin_gate(cfg.total_momentum(), cfg.coupling(), -1.0)
}

/// Spin-1/2 fermions: `(p + ic SWAP) / (p + ic)`.
pub fn fermion_gate(cfg: &CollisionConfig) -> TwoQubitGate {
    spin_gate(cfg.total_momentum(), cfg.coupling(), 1.0)
}

/// `(p + sign * ic SWAP) / (p + ic)` written out in the fixed basis.
fn spin_gate(p: f64, c: Coupling, sign: f64) -> TwoQubitGate {
    let (direct, exchange) = match c {
        Coupling::Finite(c) => {
            let den = Complex64::new(p, c);
            (Complex64::from(p) / den, I * (sign * c) / den)
        }
        Coupling::Infinite => (Complex64::from(0.0), Complex64::from(sign)),
    };
    // SWAP fixes |up,up> and |down,down>, so they see direct + exchange.
    let same = match c {
        _ if sign > 0.0 => ONE,
        Coupling::Finite(c) => Complex64::new(p, -c) / Complex64::new(p, c),
        Coupling::Infinite => -ONE,
    };
    let mut m = Matrix4::zeros();
    m[(0, 0)] = same;
    m[(3, 3)] = same;
    m[(1, 1)] = direct;
    m[(2, 2)] = direct;
    m[(1, 2)] = exchange;
    m[(2, 1)] = exchange;
    TwoQubitGate::from_unitary(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{apply, Basis, TwoQubitState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn fin(c: f64) -> Coupling {
        Coupling::Finite(c)
    }

    #[test]
    fn free_bosons_pick_up_no_phase() {
        for k in [1e-3, 0.5, 7.0, 1e4] {
            assert_eq!(lieb_liniger_phase(k, 0.0, fin(0.0)).unwrap(), ONE);
        }
    }

    #[test]
    fn impenetrable_limit_is_minus_one() {
        assert_eq!(lieb_liniger_phase(1.0, -1.0, Coupling::Infinite).unwrap(), -ONE);
        let near = lieb_liniger_phase(1.0, 0.0, fin(1e9)).unwrap();
        assert_abs_diff_eq!(near.re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(near.im, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn phase_at_equal_momentum_and_coupling_is_minus_i() {
        let s = lieb_liniger_phase(0.7, -0.3, fin(1.0)).unwrap();
        assert_abs_diff_eq!(s.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_rejects_bad_ordering_and_nan() {
        assert!(lieb_liniger_phase(1.0, 1.0, fin(1.0)).is_err());
        assert!(lieb_liniger_phase(0.0, 1.0, fin(1.0)).is_err());
        assert!(lieb_liniger_phase(f64::NAN, 0.0, fin(1.0)).is_err());
        assert!(lieb_liniger_phase(1.0, 0.0, fin(f64::INFINITY)).is_err());
        assert!(lieb_liniger_phase(1.0, 0.0, fin(-1.0)).is_err());
    }

    #[test]
    fn config_invariants() {
        assert!(CollisionConfig::new(0.0, 1.0, fin(1.0)).is_err());
        assert!(CollisionConfig::new(1.0, -1.0, fin(1.0)).is_err());
        assert!(CollisionConfig::new(1.0, 1.0, fin(-0.1)).is_err());
        assert!(CollisionConfig::new(1.0, 1.0, fin(0.0)).is_ok());
        let cfg = CollisionConfig::new(0.25, 0.25, fin(1.0)).unwrap();
        assert_eq!(cfg.total_momentum(), 0.5);
        assert_eq!(cfg.ratio(), 0.5);
    }

    #[test]
    fn coupling_parses_infinity() {
        assert_eq!("inf".parse::<Coupling>().unwrap(), Coupling::Infinite);
        assert_eq!("2.5".parse::<Coupling>().unwrap(), fin(2.5));
        assert!("-1".parse::<Coupling>().is_err());
        assert!("abc".parse::<Coupling>().is_err());
    }

    #[test]
    fn encoding_requires_ordered_positive_momenta() {
        assert!(SpinlessEncoding::new(0.0, 1.0).is_err());
        assert!(SpinlessEncoding::new(1.0, 1.0).is_err());
        assert!(SpinlessEncoding::new(2.0, 1.0).is_err());
        let enc = SpinlessEncoding::new(0.01, 100.0).unwrap();
        assert_eq!(enc.hierarchy(1.0), (0.01, 0.01));
    }

    #[test]
    fn spinless_gate_deep_hierarchy_matches_ideal_phases() {
        let c = 1.0;
        let enc = SpinlessEncoding::new(c / 1000.0, 1000.0 * c).unwrap();
        let g = spinless_gate(&enc, fin(c)).unwrap();
        let ideal = spinless_gate_idealized();
        // Closed-form deviation of each diagonal entry from +-1:
        // |S(k) - s_inf| = 2 min(k, c) / sqrt(k^2 + c^2) with k = lambda_i + lambda_j.
        for (idx, k) in [0.002, 1000.001, 1000.001, 2000.0].into_iter().enumerate() {
            let expected = 2.0 * f64::min(k, c) / (k * k + c * c).sqrt();
            let dev = (g.matrix()[(idx, idx)] - ideal.matrix()[(idx, idx)]).norm();
            assert_abs_diff_eq!(dev, expected, epsilon = 1e-12);
        }
        // Entry 00 sits at 2 lambda0 / c = 1/500 and deviates by ~4e-3.
        assert!(g.max_abs_diff(&ideal) < 4.0e-3);
    }

    #[test]
    fn spinless_gate_is_identity_at_first_order_for_weak_coupling() {
        let enc = SpinlessEncoding::new(0.5, 2.0).unwrap();
        for c in [1e-4, 1e-6] {
            let g = spinless_gate(&enc, fin(c)).unwrap();
            let dev = g.max_abs_diff(&TwoQubitGate::identity());
            // |S - 1| = 2c / sqrt(k^2 + c^2) <= 2c / k with k >= 1.
            assert!(dev <= 2.0 * c + 1e-15, "c = {c}: {dev}");
        }
    }

    #[test]
    fn spinless_gate_nearly_degenerate_encoding_stays_unitary() {
        let enc = SpinlessEncoding::new(1.0 - 1e-12, 1.0).unwrap();
        let g = spinless_gate(&enc, fin(1.0)).unwrap();
        assert!(g.unitarity_residual() < 1e-12);
        for i in 0..4 {
            assert_abs_diff_eq!(g.matrix()[(i, i)].norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn spinless_gate_rejects_zero_coupling() {
        let enc = SpinlessEncoding::new(0.5, 2.0).unwrap();
        assert!(spinless_gate(&enc, fin(0.0)).is_err());
    }

    #[test]
    fn idealized_gate_is_exact() {
        let g = spinless_gate_idealized();
        let expected = TwoQubitGate::diagonal([-ONE, ONE, ONE, ONE]);
        assert_eq!(g, expected);
    }

    #[test]
    fn boson_gate_at_p_equal_c() {
        let cfg = CollisionConfig::new(0.4, 0.6, fin(1.0)).unwrap();
        let g = boson_gate(&cfg);
        let out = apply(&g, &TwoQubitState::basis(Basis::UpDown));
        let pref = Complex64::from_polar(FRAC_1_SQRT_2, -std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!((out.amplitude(Basis::UpDown) - pref).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.amplitude(Basis::DownUp) - pref * (-I)).norm(), 0.0, epsilon = 1e-15);
        let upup = apply(&g, &TwoQubitState::basis(Basis::UpUp));
        assert_abs_diff_eq!((upup.amplitude(Basis::UpUp) + I).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fermion_gate_at_p_equal_c() {
        let cfg = CollisionConfig::new(0.5, 0.5, fin(1.0)).unwrap();
        let g = fermion_gate(&cfg);
        let out = apply(&g, &TwoQubitState::basis(Basis::UpDown));
        let pref = Complex64::from_polar(FRAC_1_SQRT_2, -std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!((out.amplitude(Basis::UpDown) - pref).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.amplitude(Basis::DownUp) - pref * I).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn free_particles_give_identity() {
        let cfg = CollisionConfig::new(1.0, 1.0, fin(0.0)).unwrap();
        assert_eq!(boson_gate(&cfg), TwoQubitGate::identity());
        assert_eq!(fermion_gate(&cfg), TwoQubitGate::identity());
    }

    #[test]
    fn infinite_coupling_limits() {
        let cfg = CollisionConfig::new(1.0, 2.0, Coupling::Infinite).unwrap();
        assert_eq!(fermion_gate(&cfg), TwoQubitGate::swap());
        let minus_swap = TwoQubitGate::swap().matrix() * (-ONE);
        assert_eq!(boson_gate(&cfg).matrix(), &minus_swap);
    }

    #[test]
    fn boson_up_up_only_changes_phase() {
        let cfg = CollisionConfig::new(0.3, 1.1, fin(0.8)).unwrap();
        let out = apply(&boson_gate(&cfg), &TwoQubitState::basis(Basis::UpUp));
        assert_abs_diff_eq!(out.amplitude(Basis::UpUp).norm(), 1.0, epsilon = 1e-15);
        for b in [Basis::UpDown, Basis::DownUp, Basis::DownDown] {
            assert_eq!(out.amplitude(b).norm(), 0.0);
        }
    }

    fn singlet() -> TwoQubitState {
        TwoQubitState::normalized([Complex64::from(0.0), ONE, -ONE, Complex64::from(0.0)]).unwrap()
    }

    proptest! {
        #[test]
        fn phase_has_unit_modulus(k in 1e-6f64..1e6, c in 0.0f64..1e6) {
            let s = lieb_liniger_phase(k / 2.0, -k / 2.0, fin(c)).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn spin_gates_unitary_and_swap_symmetric(pa in 1e-3f64..1e3, pb in 1e-3f64..1e3, c in 0.0f64..1e3) {
            let cfg = CollisionConfig::new(pa, pb, fin(c)).unwrap();
            let swap = TwoQubitGate::swap();
            for g in [boson_gate(&cfg), fermion_gate(&cfg)] {
                prop_assert!(g.unitarity_residual() < 1e-12);
                let commutator = g.compose(&swap).max_abs_diff(&swap.compose(&g));
                prop_assert!(commutator < 1e-12);
            }
        }

        #[test]
        fn fermion_fixes_aligned_spins(pa in 1e-3f64..1e3, pb in 1e-3f64..1e3, c in 0.0f64..1e3) {
            let g = fermion_gate(&CollisionConfig::new(pa, pb, fin(c)).unwrap());
            for b in [Basis::UpUp, Basis::DownDown] {
                let out = apply(&g, &TwoQubitState::basis(b));
                prop_assert!((out.amplitude(b) - ONE).norm() < 1e-15);
            }
        }

        #[test]
        fn spin_gates_share_eigenvectors(pa in 1e-3f64..1e3, pb in 1e-3f64..1e3, c in 1e-3f64..1e3) {
            let cfg = CollisionConfig::new(pa, pb, fin(c)).unwrap();
            let s = phase_of(cfg.total_momentum(), c);
            let bos = boson_gate(&cfg);
            let fer = fermion_gate(&cfg);
            let triplet0 = TwoQubitState::normalized([Complex64::from(0.0), ONE, ONE, Complex64::from(0.0)]).unwrap();
            // Singlet: bosons with antisymmetric spin do not scatter, fermions do.
            let sb = apply(&bos, &singlet());
            let sf = apply(&fer, &singlet());
            for (out, eig) in [(sb, ONE), (sf, s)] {
                for (x, y) in out.amplitudes().iter().zip(singlet().amplitudes()) {
                    prop_assert!((x - eig * y).norm() < 1e-12);
                }
            }
            for (gate, eig) in [(&bos, s), (&fer, ONE)] {
                for input in [TwoQubitState::basis(Basis::UpUp), TwoQubitState::basis(Basis::DownDown), triplet0.clone()] {
                    let out = apply(gate, &input);
                    for (x, y) in out.amplitudes().iter().zip(input.amplitudes()) {
                        prop_assert!((x - eig * y).norm() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn spinless_entries_unit_modulus(l0 in 1e-3f64..10.0, extra in 1e-3f64..100.0, c in 1e-3f64..100.0) {
            let enc = SpinlessEncoding::new(l0, l0 + extra).unwrap();
            let g = spinless_gate(&enc, fin(c)).unwrap();
            for i in 0..4 {
                prop_assert!((g.matrix()[(i, i)].norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn limit_consistency_at_ratio_1e6() {
        let c = 1.0;
        let weak = CollisionConfig::from_ratio(1e6, c).unwrap();
        assert!(boson_gate(&weak).max_abs_diff(&TwoQubitGate::identity()) < 1e-5);
        assert!(fermion_gate(&weak).max_abs_diff(&TwoQubitGate::identity()) < 1e-5);
        let strong = CollisionConfig::from_ratio(1e-6, c).unwrap();
        let swap = TwoQubitGate::swap();
        let minus_swap = TwoQubitGate::from_unitary(swap.matrix() * (-ONE));
        assert!(boson_gate(&strong).max_abs_diff(&minus_swap) < 1e-5);
        assert!(fermion_gate(&strong).max_abs_diff(&swap) < 1e-5);
    }
}
