//! The five two-qubit gates of the NMR experiment, plus their one-qubit
//! building blocks. Qubit 1 is the more significant tensor factor.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::quantum::UnitaryMatrix;
use crate::scalar::{c, Real};

/// Names accepted by [`by_name`], in library order.
pub const LIBRARY_GATES: [&str; 5] = ["h1", "h2", "t1", "t2", "cnot12"];

pub fn hadamard<T: Real>() -> UnitaryMatrix<T> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryMatrix::new(DMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]))
        .expect("Hadamard is unitary")
}

/// `diag(1, e^{i pi/4})`, the phase gate realized by `R_z(pi/4)`.
pub fn t_gate<T: Real>() -> UnitaryMatrix<T> {
    let q = std::f64::consts::FRAC_PI_4;
    UnitaryMatrix::new(DMatrix::from_row_slice(
        2,
        2,
        &[c(1., 0.), c(0., 0.), c(0., 0.), c(q.cos(), q.sin())],
    ))
    .expect("T is unitary")
}

pub fn identity2<T: Real>() -> UnitaryMatrix<T> {
    UnitaryMatrix::identity(2).expect("dim 2")
}

pub fn h1<T: Real>() -> UnitaryMatrix<T> {
    hadamard().kron(&identity2())
}

pub fn h2<T: Real>() -> UnitaryMatrix<T> {
    identity2().kron(&hadamard())
}

pub fn t1<T: Real>() -> UnitaryMatrix<T> {
    t_gate().kron(&identity2())
}

pub fn t2<T: Real>() -> UnitaryMatrix<T> {
    identity2().kron(&t_gate())
}

/// Controlled-NOT with qubit 1 as control: swaps `|10>` and `|11>`.
pub fn cnot12<T: Real>() -> UnitaryMatrix<T> {
    let mut m = DMatrix::<Complex<T>>::zeros(4, 4);
    for (row, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(row, col)] = c(1., 0.);
    }
    UnitaryMatrix::new(m).expect("CNOT is unitary")
}

/// Looks up a library gate; `identity`/`i` gives the two-qubit identity.
pub fn by_name<T: Real>(name: &str) -> Result<UnitaryMatrix<T>> {
    match name.to_ascii_lowercase().as_str() {
        "h1" => Ok(h1()),
        "h2" => Ok(h2()),
        "t1" => Ok(t1()),
        "t2" => Ok(t2()),
        "cnot12" | "cnot" => Ok(cnot12()),
        "i" | "identity" => UnitaryMatrix::identity(4),
        other => Err(Error::UnknownGate(other.to_string())),
    }
}
