use nalgebra::{Complex, DVector};

use super::check_dim;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Completes an orthonormal family to a basis of `C^dim`.
///
/// The input vectors come first, unchanged. Candidates are the canonical basis
/// vectors in index order; a candidate whose residual after projecting out the
/// current family has norm below `1e-8` is skipped. Projection is done twice
/// (classical Gram-Schmidt with reorthogonalization).
pub fn gram_schmidt_complete<T: Real>(partial: &[DVector<Complex<T>>], dim: usize) -> Result<Vec<DVector<Complex<T>>>> {
    check_dim(dim)?;
    if partial.len() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: partial.len(),
        });
    }
    let tol = T::tol(1e-10);
    for (i, v) in partial.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        for (j, w) in partial.iter().enumerate().take(i + 1) {
            let target = if i == j { T::one() } else { T::zero() };
            let dev = (w.dotc(v) - Complex::new(target, T::zero())).norm_sqr().sqrt();
            if dev > tol {
                return Err(Error::NotOrthonormal(dev.as_f64()));
            }
        }
    }

    let mut basis: Vec<DVector<Complex<T>>> = partial.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut r = DVector::<Complex<T>>::zeros(dim);
        r[k] = Complex::new(T::one(), T::zero());
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&r);
                r -= b * proj;
            }
        }
        let norm = r.norm();
        if norm < T::lit(1e-8) {
            continue;
        }
        basis.push(r.unscale(norm));
    }
    debug_assert_eq!(basis.len(), dim);
    Ok(basis)
}
