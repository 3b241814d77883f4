//! Linear-algebra substrate: amplitudes, bases, state vectors and density matrices.
//!
//! Qubit `k` lives in bit `k` of an amplitude index, with bit value 0 meaning
//! spin up along z and 1 meaning spin down along z.

mod basis;
mod density;
mod state;

pub use basis::{basis_projector, eigenvector, Basis, Outcome, Projector};
pub use density::DensityMatrix;
pub use state::{ghz_state, StateVector};

pub type Amplitude = num_complex::Complex64;

/// Absolute tolerance used for amplitude and probability comparisons.
pub const TOLERANCE: f64 = 1e-12;

/// Largest register a [`StateVector`] may hold unless a caller asks otherwise.
pub const DEFAULT_MAX_QUBITS: usize = 16;
