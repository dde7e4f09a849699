//! Seeded Haar-random states and unitaries.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dim, PureState, UnitaryMatrix};
use crate::error::Result;
use crate::scalar::Real;

/// Generator used for every stochastic component of the simulator.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_random_unitary_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix<T>> {
    check_dim(dim)?;
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian::<T, R>(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > T::zero() {
            let phase = d.unscale(m);
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(UnitaryMatrix::from_matrix_unchecked(q))
}

pub fn haar_random_unitary<T: Real>(dim: usize, seed: u64) -> Result<UnitaryMatrix<T>> {
    haar_random_unitary_with(dim, &mut seeded_rng(seed))
}

/// Unitarily invariant random pure state, returned in canonical phase.
pub fn haar_random_state_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState<T>> {
    check_dim(dim)?;
    let v = DVector::from_fn(dim, |_, _| complex_gaussian::<T, R>(rng));
    Ok(PureState::normalized(v)?.canonical())
}

pub fn haar_random_state<T: Real>(dim: usize, seed: u64) -> Result<PureState<T>> {
    haar_random_state_with(dim, &mut seeded_rng(seed))
}

/// Random Hermitian matrix (GUE-like) scaled to unit spectral radius.
pub fn random_hermitian_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    let a = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian::<T, R>(rng));
    let h = (&a + a.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let radius = h
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x.norm1()));
    if radius > T::zero() {
        h.unscale(radius)
    } else {
        h
    }
}
