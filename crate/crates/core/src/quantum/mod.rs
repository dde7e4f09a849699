//! Complex linear-algebra substrate and shared quantum types.
//!
//! Everything here is generic over the [`Real`] scalar; the crate root
//! re-exports `f64` aliases used by the protocols.

mod basis;
mod json;
mod observable;
mod pauli;
pub mod random;
mod state;
mod unitary;

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

pub use basis::gram_schmidt_complete;
pub use json::{StateJson, UnitaryJson};
pub use observable::Observable;
pub use pauli::{ptm_from_unitary, qubit_count, Pauli, PauliBasis, PauliString, PauliTransferMatrix};
pub use random::{
    haar_random_state, haar_random_state_with, haar_random_unitary, haar_random_unitary_with,
    random_hermitian_with, seeded_rng, SimRng,
};
pub use state::{expectation, trace_product, DensityMatrix, PureState, QuantumState};
pub use unitary::{nearest_unitary, unitarity_deviation, UnitaryMatrix};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

/// Amplitudes below this modulus are never used as the phase reference.
pub const PHASE_FIX_THRESHOLD: f64 = 1e-8;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    match dim {
        0 => Err(Error::ZeroDimension),
        d if d > MAX_DIM => Err(Error::DimensionTooLarge(d)),
        _ => Ok(()),
    }
}

/// Largest entrywise `|M - M^dag|`.
pub(crate) fn hermitian_deviation<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).modulus();
            worst = worst.max(d);
        }
    }
    worst
}

/// Canonical basis vector `|index>`.
pub fn canonical_vector<T: Real>(dim: usize, index: usize) -> DVector<Complex<T>> {
    let mut v = DVector::zeros(dim);
    v[index] = Complex::new(T::one(), T::zero());
    v
}
