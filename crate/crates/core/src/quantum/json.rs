//! JSON exchange shapes:
//! unitary `{"dim": d, "re": [[..]], "im": [[..]]}` (row-major), state
//! `{"dim": d, "amplitudes": {"re": [..], "im": [..]}}`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{PureState, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudesJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub amplitudes: AmplitudesJson,
}

impl UnitaryJson {
    pub fn from_matrix<T: Real>(m: &DMatrix<Complex<T>>) -> Self {
        let rows = |f: fn(&Complex<T>) -> T| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)]).as_f64()).collect())
                .collect()
        };
        Self {
            dim: m.nrows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<DMatrix<Complex<T>>> {
        let d = self.dim;
        let shape_ok = self.re.len() == d
            && self.im.len() == d
            && self.re.iter().chain(self.im.iter()).all(|r| r.len() == d);
        if !shape_ok {
            return Err(Error::Json(format!("expected {d}x{d} re/im arrays")));
        }
        Ok(DMatrix::from_fn(d, d, |i, j| {
            Complex::new(T::lit(self.re[i][j]), T::lit(self.im[i][j]))
        }))
    }
}

impl<T: Real> Serialize for UnitaryMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        UnitaryJson::from_matrix(self.matrix()).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for UnitaryMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = UnitaryJson::deserialize(d)?;
        let m = raw.to_matrix().map_err(serde::de::Error::custom)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> Serialize for PureState<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            dim: self.dim(),
            amplitudes: AmplitudesJson {
                re: self.amplitudes().iter().map(|z| z.re.as_f64()).collect(),
                im: self.amplitudes().iter().map(|z| z.im.as_f64()).collect(),
            },
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for PureState<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(d)?;
        let a = &raw.amplitudes;
        if a.re.len() != raw.dim || a.im.len() != raw.dim {
            return Err(serde::de::Error::custom("amplitude arrays must have length dim"));
        }
        let v = DVector::from_fn(raw.dim, |i, _| Complex::new(T::lit(a.re[i]), T::lit(a.im[i])));
        PureState::new(v).map_err(serde::de::Error::custom)
    }
}
