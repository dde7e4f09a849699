use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{Complex, DMatrix, DVector};

use super::{check_dim, hermitian_deviation, PauliString, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermitian matrix queried against an oracle, with a label for the ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T: Real> {
    matrix: DMatrix<Complex<T>>,
    label: String,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: DMatrix<Complex<T>>, label: impl Into<String>) -> Result<Self> {
        check_dim(matrix.nrows())?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > T::tol(1e-12) {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    /// `E_k = |k><k|`.
    pub fn projector(dim: usize, k: usize) -> Result<Self> {
        check_index(dim, k)?;
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex::new(T::one(), T::zero());
        Ok(Self {
            matrix: m,
            label: format!("E{k}"),
        })
    }

    /// `|n><k| + |k><n|`.
    pub fn coherence_x(dim: usize, k: usize, n: usize) -> Result<Self> {
        let (x, _) = Self::coherence_pair_basis(dim, k, n)?;
        Ok(x)
    }

    /// `i(|n><k| - |k><n|)`.
    pub fn coherence_y(dim: usize, k: usize, n: usize) -> Result<Self> {
        let (_, y) = Self::coherence_pair_basis(dim, k, n)?;
        Ok(y)
    }

    fn coherence_pair_basis(dim: usize, k: usize, n: usize) -> Result<(Self, Self)> {
        check_index(dim, k)?;
        check_index(dim, n)?;
        if k == n {
            return Err(Error::InvalidPair(k, n));
        }
        let mut basis_k = DVector::zeros(dim);
        basis_k[k] = Complex::new(T::one(), T::zero());
        let mut basis_n = DVector::zeros(dim);
        basis_n[n] = Complex::new(T::one(), T::zero());
        let (mut x, mut y) = Self::coherence_pair(&basis_k, &basis_n);
        x.label = format!("X{k},{n}");
        y.label = format!("Y{k},{n}");
        Ok((x, y))
    }

    /// X- and Y-type coherence observables between a reference vector and
    /// a target vector: `|t><r| + |r><t|` and `i(|t><r| - |r><t|)`.
    ///
    /// For a state `psi`, `<X> + i<Y> = 2 <r|psi>^* <t|psi>`.
    pub fn coherence_pair(reference: &DVector<Complex<T>>, target: &DVector<Complex<T>>) -> (Self, Self) {
        let tr = target * reference.adjoint();
        let rt = tr.adjoint();
        let i = Complex::new(T::zero(), T::one());
        let x = &tr + &rt;
        let y = (tr - rt) * i;
        (
            Self {
                matrix: x,
                label: "Xrot".into(),
            },
            Self {
                matrix: y,
                label: "Yrot".into(),
            },
        )
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        Self {
            matrix: p.matrix(),
            label: p.label(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `U O U^dag`: measuring this after `U` equals measuring `O` before it.
    pub fn conjugated_by(&self, u: &UnitaryMatrix<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        Ok(Self {
            matrix: u.matrix() * &self.matrix * u.matrix().adjoint(),
            label: self.label.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Stable hash of the matrix entries, used to identify settings in the
    /// measurement ledger.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim().hash(&mut h);
        for z in self.matrix.iter() {
            z.re.as_f64().to_bits().hash(&mut h);
            z.im.as_f64().to_bits().hash(&mut h);
        }
        h.finish()
    }
}

fn check_index(dim: usize, k: usize) -> Result<()> {
    check_dim(dim)?;
    if k >= dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: k + 1,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PureState;
    use crate::scalar::c;

    #[test]
    fn coherence_pair_recovers_product_of_amplitudes() {
        let psi = PureState::<f64>::from_slice(&[c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.0), c(0.48, 0.64)]).unwrap();
        let x = Observable::coherence_x(4, 1, 3).unwrap();
        let y = Observable::coherence_y(4, 1, 3).unwrap();
        let z = Complex::new(psi.expectation(&x).unwrap(), psi.expectation(&y).unwrap()) * 0.5;
        let expected = psi.amplitude(1).conj() * psi.amplitude(3);
        assert!((z - expected).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<Complex<f64>>::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(Observable::new(m, "bad"), Err(Error::NotHermitian(_))));
        assert!(Observable::<f64>::coherence_x(2, 1, 1).is_err());
    }

    #[test]
    fn fingerprint_distinguishes_settings() {
        let a = Observable::<f64>::coherence_x(3, 0, 1).unwrap();
        let b = Observable::<f64>::coherence_y(3, 0, 1).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().with_label("other").fingerprint());
    }
}
