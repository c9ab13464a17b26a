//! Entangling gates between flying qubits from spin-independent 1D contact
//! scattering.
//!
//! * [`smatrix`]: exact two-body S-matrices and the gates they induce for
//!   spinless bosons (momentum-magnitude encoding), spin-carrying bosons and
//!   spin-1/2 fermions.
//! * [`entanglement`]: concurrence, Makhlin invariants, entangling power and
//!   momentum sweeps.
//! * [`oracle`]: independent check of the two-body phase by wavepacket
//!   propagation against a regularized barrier, plus momentum-spread
//!   fidelity analysis.
//! * [`physparams`]: SI laboratory parameters to natural-unit `c` and `p`.

pub mod entanglement;
pub mod error;
pub mod gate;
pub mod oracle;
pub mod physparams;
pub mod smatrix;

pub use error::{Error, Result};
pub use gate::{apply, Basis, TwoQubitGate, TwoQubitState};
pub use smatrix::{CollisionConfig, Coupling, GateFamily, SpinlessEncoding};
