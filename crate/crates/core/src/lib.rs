//! Simulation of adaptive quantum state and process tomography.
//!
//! * [`apst`] reconstructs a pure state from at most `2d - 1` expectation
//!   values, choosing later observables from earlier outcomes.
//! * [`aupt`] reconstructs a unitary channel column by column from at most
//!   `d^2 + d - 1` expectation values.
//! * [`stdqpt`] is the non-adaptive Pauli-transfer-matrix baseline.
//! * [`nmr2q`] is the two-qubit variant restricted to NMR-style readouts,
//!   together with a pulse-sequence compiler.
//! * [`metrics`] estimates average gate fidelity by Haar sampling.
//!
//! Every protocol talks to the hidden object only through an [`oracle`],
//! whose ledger defines the number of measurements.

pub mod apst;
pub mod aupt;
pub mod error;
pub mod gates;
pub mod metrics;
pub mod nmr2q;
pub mod oracle;
pub mod quantum;
pub mod scalar;
pub mod stdqpt;

pub use error::{Error, Result};
pub use scalar::Real;

pub use nalgebra::Complex;

/// Complex scalar at working precision.
pub type C64 = Complex<f64>;
pub type PureState = quantum::PureState<f64>;
pub type DensityMatrix = quantum::DensityMatrix<f64>;
pub type UnitaryMatrix = quantum::UnitaryMatrix<f64>;
pub type Observable = quantum::Observable<f64>;
pub type PauliTransferMatrix = quantum::PauliTransferMatrix<f64>;
pub type PauliBasis = quantum::PauliBasis<f64>;

pub type PureState32 = quantum::PureState<f32>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type UnitaryMatrix32 = quantum::UnitaryMatrix<f32>;
pub type Observable32 = quantum::Observable<f32>;
pub type PauliTransferMatrix32 = quantum::PauliTransferMatrix<f32>;
