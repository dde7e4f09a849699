use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use super::{check_dim, hermitian_deviation, Observable, UnitaryMatrix, PHASE_FIX_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized pure state `sum_n a_n |n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: DVector<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Wraps an amplitude vector that is already normalized to `1e-12`.
    pub fn new(amplitudes: DVector<Complex<T>>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - T::one()).norm1() > T::tol(1e-12) {
            return Err(Error::NotNormalized(norm_sq.as_f64()));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: DVector<Complex<T>>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm <= T::tol(1e-300) {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[Complex<T>]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index + 1,
            });
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: v })
    }

    /// Weighted superposition of basis states, normalized afterwards.
    pub fn superposition(dim: usize, terms: &[(usize, Complex<T>)]) -> Result<Self> {
        check_dim(dim)?;
        let mut v = DVector::zeros(dim);
        for &(index, weight) in terms {
            if index >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: index + 1,
                });
            }
            v[index] += weight;
        }
        Self::normalized(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> DVector<Complex<T>> {
        self.amplitudes
    }

    /// Same ray with the first amplitude of modulus above `1e-8` made real
    /// and non-negative.
    pub fn canonical(&self) -> Self {
        Self {
            amplitudes: canonicalize_phase(self.amplitudes.clone()),
        }
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        check_same(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.overlap(other)?.modulus_squared())
    }

    pub fn density_matrix(&self) -> DensityMatrix<T> {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// `<psi|O|psi>`.
    pub fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        check_same(self.dim(), obs.dim())?;
        Ok(self.amplitudes.dotc(&(obs.matrix() * &self.amplitudes)).re)
    }

    pub fn evolve(&self, u: &UnitaryMatrix<T>) -> Result<Self> {
        check_same(self.dim(), u.dim())?;
        Ok(Self {
            amplitudes: u.matrix() * &self.amplitudes,
        })
    }
}

/// Positive semidefinite, unit-trace, Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        check_dim(matrix.nrows())?;
        check_same(matrix.nrows(), matrix.ncols())?;
        let dev = hermitian_deviation(&matrix);
        if dev > T::tol(1e-12) {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        let trace = matrix.trace();
        if (trace.re - T::one()).norm1() > T::tol(1e-12) || trace.im.norm1() > T::tol(1e-12) {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} + {}i",
                trace.re.as_f64(),
                trace.im.as_f64()
            )));
        }
        let rho = Self { matrix };
        let min_eig = rho.min_eigenvalue();
        if min_eig < -T::tol(1e-10) {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {}",
                min_eig.as_f64()
            )));
        }
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants hold up to
    /// rounding (e.g. the output of a unital channel on a valid state).
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex<T>>) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let scale = T::one() / T::from_usize(dim).unwrap();
        Ok(Self {
            matrix: DMatrix::identity(dim, dim) * Complex::new(scale, T::zero()),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        check_same(self.dim(), obs.dim())?;
        Ok(trace_product(&self.matrix, obs.matrix()).re)
    }

    pub fn eigenvalues(&self) -> DVector<T> {
        self.matrix.clone().symmetric_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().min()
    }

    pub fn purity(&self) -> T {
        trace_product(&self.matrix, &self.matrix).re
    }

    /// `||rho - sigma||_1 / 2`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        check_same(self.dim(), other.dim())?;
        let diff = &self.matrix - &other.matrix;
        let eig = diff.symmetric_eigenvalues();
        Ok(eig.iter().fold(T::zero(), |acc, &x| acc + x.norm1()) * T::lit(0.5))
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with_pure(&self, psi: &PureState<T>) -> Result<T> {
        check_same(self.dim(), psi.dim())?;
        let a = psi.amplitudes();
        Ok(a.dotc(&(&self.matrix * a)).re)
    }
}

/// Common access for anything an expectation value can be taken on.
pub trait QuantumState<T: Real> {
    fn dim(&self) -> usize;
    fn expectation(&self, obs: &Observable<T>) -> Result<T>;
}

impl<T: Real> QuantumState<T> for PureState<T> {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }
    fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        PureState::expectation(self, obs)
    }
}

impl<T: Real> QuantumState<T> for DensityMatrix<T> {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }
    fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        DensityMatrix::expectation(self, obs)
    }
}

/// Exact expectation value `tr(rho O)`; no sampling.
pub fn expectation<T: Real, S: QuantumState<T>>(state: &S, obs: &Observable<T>) -> Result<T> {
    state.expectation(obs)
}

/// `tr(A B)` without forming the product.
pub fn trace_product<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub(crate) fn canonicalize_phase<T: Real>(mut v: DVector<Complex<T>>) -> DVector<Complex<T>> {
    if let Some(&pivot) = v.iter().find(|z| z.modulus() > T::lit(PHASE_FIX_THRESHOLD)) {
        let phase = pivot.conj().unscale(pivot.modulus());
        v *= phase;
    }
    v
}

fn check_same(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn basis_and_plus_expectations() {
        let zero = PureState::<f64>::basis(2, 0).unwrap();
        let e0 = Observable::projector(2, 0).unwrap();
        assert!((zero.expectation(&e0).unwrap() - 1.0).abs() < 1e-15);

        let plus = PureState::<f64>::superposition(2, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let x = Observable::coherence_x(2, 0, 1).unwrap();
        assert!((plus.density_matrix().expectation(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!((plus.density_matrix().expectation(&e0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_and_mismatched() {
        let v = DVector::from_vec(vec![c::<f64>(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(PureState::new(v), Err(Error::NotNormalized(_))));
        let psi = PureState::<f64>::basis(3, 0).unwrap();
        let e = Observable::projector(2, 0).unwrap();
        assert!(matches!(
            psi.expectation(&e),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonical_phase_makes_first_amplitude_real() {
        let psi = PureState::<f64>::from_slice(&[c(0.0, 1e-9), c(0.0, -0.6), c(0.8, 0.0)]).unwrap();
        let can = psi.canonical();
        assert!(can.amplitude(1).im.abs() < 1e-15);
        assert!(can.amplitude(1).re > 0.0);
        assert!((can.fidelity(&psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_density_matrix_is_rank_one() {
        let psi = PureState::<f64>::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rho = DensityMatrix::new(psi.density_matrix().into_matrix()).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let eig = rho.eigenvalues();
        assert!(eig.iter().filter(|x| x.abs() > 1e-12).count() == 1);
    }

    #[test]
    fn density_validation() {
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![c::<f64>(1.2, 0.0), c(-0.2, 0.0)]));
        assert!(DensityMatrix::new(bad).is_err());
        let mixed = DensityMatrix::<f64>::maximally_mixed(4).unwrap();
        assert!((mixed.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let a = PureState::<f64>::basis(2, 0).unwrap().density_matrix();
        let b = PureState::<f64>::basis(2, 1).unwrap().density_matrix();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let plus = PureState::<f32>::superposition(2, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let x = Observable::<f32>::coherence_x(2, 0, 1).unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-6);
    }
}
