//! Independent check of the contact S-matrix by wavepacket propagation.
//!
//! The two-body problem is reduced to the relative coordinate (see
//! [`relative`]), the contact term is replaced by narrow barriers of fixed
//! area, packets are propagated with Crank-Nicolson and the amplitudes are
//! read off in momentum space against a barrier-free twin run. The widths are
//! then extrapolated to zero.

pub mod extract;
pub mod extrapolate;
pub mod grid;
pub mod propagate;
pub mod relative;
pub mod snapshot;
pub mod spread;
pub mod study;

pub use extract::{
    even_channel_phase, extract_amplitudes, odd_channel_factor, odd_channel_null, scatter, ScatteringAmplitudes,
};
pub use extrapolate::{width_extrapolate, Extrapolated};
pub use grid::{BarrierShape, BarrierSpec, GridSpec, Mesh, Refinement, WavepacketSpec};
pub use propagate::{propagate, propagate_state, Wavefunction};
pub use relative::{reduce_to_relative, RelativeProblem};
pub use spread::{spread_averaged_gate, SpreadFidelity};
pub use study::{OracleSetup, PhaseComparison, Preset};
