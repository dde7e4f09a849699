//! Scalar abstraction for the linear-algebra layer.
//!
//! The state, unitary, observable and Pauli machinery is written once over
//! [`Real`] and instantiated for `f64` (the working precision of every
//! protocol) and `f32`.

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;

/// Real field usable as the component type of the complex matrices here.
pub trait Real: RealField + Copy + ToPrimitive {
    /// Absolute tolerance appropriate for this precision, given the value
    /// that applies at double precision. Single precision cannot resolve
    /// tolerances tighter than roughly `1e-5` on unit-norm objects.
    fn tol(at_f64: f64) -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f64 {
    fn tol(at_f64: f64) -> Self {
        at_f64
    }
}

impl Real for f32 {
    fn tol(at_f64: f64) -> Self {
        at_f64.max(1e-5) as f32
    }
}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}
