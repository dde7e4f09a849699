//! Two-qubit pulse sequences: single-qubit rotations and free evolution
//! under `H = (pi J / 2) Z1 Z2`.
//!
//! A [`PulseSeq`] lists terms in time order, first applied first. Written
//! operator products run the other way; use [`PulseSeq::from_written_order`]
//! to transcribe them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{UnitaryMatrix, C64};

/// Scalar coupling of the reference two-spin sample, in Hz.
pub const DEFAULT_J_HZ: f64 = 214.6;

const LIBRARY_JSON: &str = include_str!("../../data/gate_library.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PulseTerm {
    /// `exp(-i angle sigma_axis / 2)` on qubit `q` (1 or 2).
    #[serde(rename = "rot")]
    Rotation { q: usize, axis: Axis, angle: f64 },
    /// Free evolution for `t` seconds.
    #[serde(rename = "free")]
    FreeEvolution { t: f64 },
}

impl PulseTerm {
    pub fn rot(q: usize, axis: Axis, angle: f64) -> Self {
        PulseTerm::Rotation { q, axis, angle }
    }

    pub fn free(t: f64) -> Self {
        PulseTerm::FreeEvolution { t }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PulseTerm::Rotation { q, angle, .. } => {
                if q != 1 && q != 2 {
                    return Err(Error::UnsupportedQubit(q));
                }
                if !angle.is_finite() {
                    return Err(Error::InvalidPulse(format!("rotation angle {angle}")));
                }
            }
            PulseTerm::FreeEvolution { t } => {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::InvalidPulse(format!("free evolution time {t}")));
                }
            }
        }
        Ok(())
    }

    /// The term's 4x4 unitary at coupling `j_hz`.
    pub fn unitary(&self, j_hz: f64) -> Result<DMatrix<C64>> {
        self.validate()?;
        Ok(match *self {
            PulseTerm::Rotation { q, axis, angle } => rotation(q, axis, angle),
            PulseTerm::FreeEvolution { t } => free_evolution(t, j_hz),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSeq {
    terms: Vec<PulseTerm>,
}

impl PulseSeq {
    /// Terms in time order.
    pub fn new(terms: Vec<PulseTerm>) -> Result<Self> {
        terms.iter().try_for_each(PulseTerm::validate)?;
        Ok(Self { terms })
    }

    /// Terms as written in an operator product, rightmost applied first.
    pub fn from_written_order(mut terms: Vec<PulseTerm>) -> Result<Self> {
        terms.reverse();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[PulseTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total free-evolution time.
    pub fn duration(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                PulseTerm::FreeEvolution { t } => *t,
                PulseTerm::Rotation { .. } => 0.0,
            })
            .sum()
    }
}

/// Product of the sequence's term unitaries, later terms on the left.
pub fn compile_pulse_sequence(seq: &PulseSeq, j_hz: f64) -> Result<UnitaryMatrix> {
    let mut u = DMatrix::<C64>::identity(4, 4);
    for term in seq.terms() {
        u = term.unitary(j_hz)? * u;
    }
    UnitaryMatrix::new(u)
}

fn sigma(axis: Axis) -> [[C64; 2]; 2] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => [[z, one], [one, z]],
        Axis::Y => [[z, -i], [i, z]],
        Axis::Z => [[one, z], [z, -one]],
    }
}

/// `exp(-i angle sigma / 2)` on qubit `q`, qubit 1 being the most
/// significant.
pub fn rotation(q: usize, axis: Axis, angle: f64) -> DMatrix<C64> {
    let s = sigma(axis);
    let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let r = DMatrix::from_fn(2, 2, |a, b| {
        let id = if a == b { c } else { 0.0 };
        C64::new(id, 0.0) - C64::new(0.0, sn) * s[a][b]
    });
    let id = DMatrix::<C64>::identity(2, 2);
    if q == 1 {
        r.kronecker(&id)
    } else {
        id.kronecker(&r)
    }
}

/// `exp(-i (pi J / 2) Z1 Z2 t)`.
pub fn free_evolution(t: f64, j_hz: f64) -> DMatrix<C64> {
    let phi = PI * j_hz / 2.0 * t;
    let zz = [1.0, -1.0, -1.0, 1.0];
    DMatrix::from_fn(4, 4, |a, b| {
        if a == b {
            C64::from_polar(1.0, -phi * zz[a])
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Named pulse sequences with their coupling constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateLibrary {
    #[serde(rename = "J")]
    pub j_hz: f64,
    pub gates: BTreeMap<String, PulseSeq>,
}

impl GateLibrary {
    /// The five reference gates (plus `t1_xy`/`t2_xy`, the z-rotations
    /// realized as `Rx(pi/2) Ry(theta) Rx(-pi/2)`).
    pub fn builtin() -> Self {
        Self::from_json(LIBRARY_JSON).expect("bundled gate library is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let lib: Self = serde_json::from_str(s)?;
        for seq in lib.gates.values() {
            seq.terms().iter().try_for_each(PulseTerm::validate)?;
        }
        Ok(lib)
    }

    pub fn get(&self, name: &str) -> Result<&PulseSeq> {
        self.gates.get(name).ok_or_else(|| Error::UnknownGate(name.to_string()))
    }

    pub fn compile(&self, name: &str) -> Result<UnitaryMatrix> {
        compile_pulse_sequence(self.get(name)?, self.j_hz)
    }
}
