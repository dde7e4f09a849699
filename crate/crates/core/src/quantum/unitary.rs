use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use super::{check_dim, PHASE_FIX_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `d x d` complex matrix with `U^dag U = I` to `1e-10` (Frobenius).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        check_dim(matrix.nrows())?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > T::tol(1e-10) {
            return Err(Error::NotUnitary(dev.as_f64()));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex<T>>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            matrix: DMatrix::identity(dim, dim),
        })
    }

    /// Builds a unitary from its columns `U|n>`.
    pub fn from_columns(columns: &[DVector<Complex<T>>]) -> Result<Self> {
        Self::new(DMatrix::from_columns(columns))
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

    pub fn column(&self, j: usize) -> DVector<Complex<T>> {
        self.matrix.column(j).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// Tensor product `self (x) rhs`, with `self` on the more significant
    /// qubits.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }

    pub fn scaled_by_phase(&self, phi: T) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            matrix: &self.matrix * Complex::new(c, s),
        }
    }

    /// Global phase fixed so that the first entry of column 0 (scanning
    /// down, then across columns) with modulus above `1e-8` is real and
    /// non-negative.
    pub fn canonical(&self) -> Self {
        Self {
            matrix: canonicalize_matrix_phase(self.matrix.clone()),
        }
    }

    pub fn unitarity_deviation(&self) -> T {
        unitarity_deviation(&self.matrix)
    }
}

pub(crate) fn canonicalize_matrix_phase<T: Real>(mut m: DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    if let Some(&pivot) = m.iter().find(|z| z.modulus() > T::lit(PHASE_FIX_THRESHOLD)) {
        let phase = pivot.conj().unscale(pivot.modulus());
        m *= phase;
    }
    m
}

/// `||U^dag U - I||_F`.
pub fn unitarity_deviation<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let n = m.nrows();
    (m.ad_mul(m) - DMatrix::<Complex<T>>::identity(n, n)).norm()
}

/// Polar factor of `m`: the unitary closest to `m` in Frobenius norm.
pub fn nearest_unitary<T: Real>(m: &DMatrix<Complex<T>>) -> Result<UnitaryMatrix<T>> {
    check_dim(m.nrows())?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let svd = m.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if smallest <= T::tol(1e-12) * largest.max(T::one()) {
        return Err(Error::Singular(smallest.as_f64()));
    }
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    Ok(UnitaryMatrix::from_matrix_unchecked(u * v_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{haar_random_unitary, random_hermitian_with, seeded_rng};
    use crate::scalar::c;

    #[test]
    fn nearest_unitary_fixes_unitaries_and_scaling() {
        let u = haar_random_unitary::<f64>(4, 3).unwrap();
        let p = nearest_unitary(u.matrix()).unwrap();
        assert!((p.matrix() - u.matrix()).norm() < 1e-12);

        let two = DMatrix::<Complex<f64>>::identity(3, 3) * c(2.0, 0.0);
        let p = nearest_unitary(&two).unwrap();
        assert!((p.matrix() - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn nearest_unitary_of_perturbed_identity() {
        // Independent route: for M = I + eps*E with E Hermitian, M is itself
        // Hermitian positive definite, so its polar factor is exactly I.
        // With an anti-Hermitian part A the first-order polar factor is
        // exp(A) ~ I + A.
        let mut rng = seeded_rng(11);
        let e = random_hermitian_with::<f64, _>(3, &mut rng);
        let m = DMatrix::identity(3, 3) + e.clone() * c(0.01, 0.0);
        let p = nearest_unitary(&m).unwrap();
        assert!((p.matrix() - DMatrix::identity(3, 3)).norm() < 1e-10);

        let a = e * c(0.0, 1e-4);
        let m = DMatrix::identity(3, 3) + &a;
        let p = nearest_unitary(&m).unwrap();
        let expected = DMatrix::identity(3, 3) + &a;
        assert!((p.matrix() - expected).norm() < 1e-7);
        assert!(p.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn singular_input_is_rejected() {
        let m = DMatrix::<Complex<f64>>::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(matches!(nearest_unitary(&m), Err(Error::Singular(_))));
    }

    #[test]
    fn non_unitary_rejected() {
        let m = DMatrix::<Complex<f64>>::identity(2, 2) * c(1.1, 0.0);
        assert!(matches!(UnitaryMatrix::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn canonical_removes_global_phase() {
        let u = haar_random_unitary::<f64>(3, 5).unwrap();
        let a = u.canonical();
        let b = u.scaled_by_phase(1.234).canonical();
        assert!((a.matrix() - b.matrix()).norm() < 1e-12);
        assert!(a.matrix()[(0, 0)].im.abs() < 1e-15);
    }
}
