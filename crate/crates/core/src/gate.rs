//! Two-qubit gates and pure states in the fixed computational basis.
//!
//! Basis order is `(00, 01, 10, 11)` with qubit A (the right-mover) in the
//! first slot. For spin encodings `0 = up` and `1 = down`, so the order reads
//! `(up-up, up-down, down-up, down-down)`. Index of `|a>_A |b>_B` is `2a + b`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::ser::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Entrywise tolerance on `U^dag U - I` accepted for a gate.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Tolerance on `| |psi| - 1 |` accepted for a state.
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Computational basis labels, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    UpUp = 0,
    UpDown = 1,
    DownUp = 2,
    DownDown = 3,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::UpUp, Basis::UpDown, Basis::DownUp, Basis::DownDown];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Basis::UpUp => "up,up",
            Basis::UpDown => "up,down",
            Basis::DownUp => "down,up",
            Basis::DownDown => "down,down",
        }
    }
}

/// 4x4 unitary acting on the two-qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate {
    matrix: Matrix4<Complex64>,
}

impl TwoQubitGate {
    /// Wraps `matrix`, rejecting it if it is not unitary to [`UNITARITY_TOL`].
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if !(residual <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix })
    }

    /// Internal constructor for matrices unitary by construction.
    pub(crate) fn from_unitary(matrix: Matrix4<Complex64>) -> Self {
        debug_assert!(unitarity_residual(&matrix) < 1e-10);
        Self { matrix }
    }

    pub fn identity() -> Self {
        Self { matrix: Matrix4::identity() }
    }

    /// The permutation operator: `|uv> -> |vu>`.
    pub fn swap() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m[(3, 3)] = ONE;
        Self { matrix: m }
    }

    /// Controlled-Z, `diag(1, 1, 1, -1)`.
    pub fn cz() -> Self {
        Self::diagonal([ONE, ONE, ONE, -ONE])
    }

    /// Controlled-NOT with qubit A as control.
    pub fn cnot() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        Self { matrix: m }
    }

    pub(crate) fn diagonal(entries: [Complex64; 4]) -> Self {
        Self { matrix: Matrix4::from_diagonal(&Vector4::from(entries)) }
    }

    /// Tensor product `a (x) b` of two single-qubit unitaries, `a` on qubit A.
    pub fn local(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for (i, j, k, l) in bit_quads() {
            m[(2 * i + k, 2 * j + l)] = a[i][j] * b[k][l];
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: Basis, col: Basis) -> Complex64 {
        self.matrix[(row.index(), col.index())]
    }

    /// Max entrywise `|U^dag U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &TwoQubitGate) -> Self {
        Self { matrix: self.matrix * other.matrix }
    }

    /// Image of a basis state, i.e. one column of the matrix.
    pub fn column(&self, input: Basis) -> TwoQubitState {
        let col = self.matrix.column(input.index()).into_owned();
        TwoQubitState { amplitudes: col }
    }

    /// Max entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &TwoQubitGate) -> f64 {
        (self.matrix - other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise distance to `other` after removing the best global phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &TwoQubitGate) -> f64 {
        let overlap = (self.matrix.adjoint() * other.matrix).trace();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        (self.matrix * phase - other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_rows(&self) -> [[[f64; 2]; 4]; 4] {
        let mut rows = [[[0.0; 2]; 4]; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let z = self.matrix[(r, c)];
                *cell = [z.re, z.im];
            }
        }
        rows
    }
}

impl Serialize for TwoQubitGate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

fn bit_quads() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|n| ((n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1))
}

pub(crate) fn unitarity_residual(m: &Matrix4<Complex64>) -> f64 {
    let defect = m.adjoint() * m - Matrix4::<Complex64>::identity();
    defect.iter().map(|z| z.norm()).fold(0.0, |acc, x| if x.is_nan() { f64::NAN } else { acc.max(x) })
}

/// Normalized pure state of two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    amplitudes: Vector4<Complex64>,
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let deviation = (v.norm() - 1.0).abs();
        if !(deviation <= NORM_TOL) {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes: v })
    }

    /// Normalizes `amplitudes`; fails only on a zero vector.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("amplitudes", "cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { amplitudes: v / Complex64::from(n) })
    }

    pub fn basis(b: Basis) -> Self {
        let mut v = Vector4::from([ZERO; 4]);
        v[b.index()] = ONE;
        Self { amplitudes: v }
    }

    /// `|a>_A (x) |b>_B`; both factors are normalized first.
    pub fn product(a: [Complex64; 2], b: [Complex64; 2]) -> Result<Self> {
        Self::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub(crate) fn from_vector_unchecked(amplitudes: Vector4<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitude(&self, b: Basis) -> Complex64 {
        self.amplitudes[b.index()]
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.amplitudes[0], self.amplitudes[1], self.amplitudes[2], self.amplitudes[3]]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|<self|other>|`.
    pub fn overlap_abs(&self, other: &TwoQubitState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }
}

/// Matrix-vector product. The result is not renormalized.
pub fn apply(gate: &TwoQubitGate, state: &TwoQubitState) -> TwoQubitState {
    TwoQubitState::from_vector_unchecked(gate.matrix * state.amplitudes)
}
