//! Adaptive unitary process tomography.
//!
//! Stage 1 runs pure-state tomography on `U|0>`. Stage `j` prepares
//! `(|0> + |j-1>)/sqrt2` and works in a basis whose first vectors are the
//! columns found so far; the output's coordinates on those are known, so
//! only the remaining `d - j + 1` coherences against `|u_0>` are queried.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};

use crate::apst::{apst_reconstruct_with, coherences_against, ApstConfig};
use crate::error::{Error, Result};
use crate::oracle::{ChannelOracle, MeasurementLedger, PreparedInput};
use crate::quantum::{gram_schmidt_complete, nearest_unitary, unitarity_deviation};
use crate::{PureState, UnitaryMatrix, C64};

const COLUMN_NORM_BOUND_EXACT: f64 = 1e-6;
const COLUMN_NORM_BOUND_SHOTS: f64 = 0.05;
/// Allowed deviation of `|<u_0|phi>|` from `1/sqrt2`.
const REFERENCE_OVERLAP_TOL: f64 = 0.05;
/// Largest Frobenius distance from the raw estimate to its polar factor.
const NON_UNITARY_BOUND: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct AuptResult {
    /// Polar projection of `raw`, global phase fixed on column 0.
    pub unitary: UnitaryMatrix,
    pub raw: DMatrix<C64>,
    pub measurement_count: usize,
    pub stage_counts: Vec<usize>,
    pub ledger: MeasurementLedger,
}

impl AuptResult {
    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "count": self.measurement_count,
            "stage_counts": self.stage_counts,
            "raw": crate::quantum::UnitaryJson::from_matrix(&self.raw),
            "unitary": serde_json::to_value(&self.unitary)?,
        }))
    }
}

/// Reconstruct the oracle's hidden unitary; consumes the session.
pub fn aupt_reconstruct(mut oracle: ChannelOracle, config: &ApstConfig) -> Result<AuptResult> {
    let d = oracle.dim();
    if let Some(expected) = config.dim {
        if expected != d {
            return Err(Error::DimensionMismatch { expected, actual: d });
        }
    }
    let mode = oracle.mode();
    let column_bound = if mode.is_exact() {
        COLUMN_NORM_BOUND_EXACT
    } else {
        COLUMN_NORM_BOUND_SHOTS
    };

    let mut stage_counts = Vec::with_capacity(d);
    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(d);

    // Stage 1.
    let stage1 = {
        let mut prepared = PreparedInput::new(&mut oracle, PureState::basis(d, 0)?)?;
        apst_reconstruct_with(&mut prepared, config)?
    };
    stage_counts.push(stage1.measurement_count);
    columns.push(stage1.state.into_amplitudes());

    // Orthonormalized copies of the known columns; identical to `columns`
    // in exact arithmetic.
    let mut known: Vec<DVector<C64>> = vec![columns[0].clone()];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 2..=d {
        let before = oracle.ledger().count();
        let input = PureState::superposition(d, &[(0, C64::new(1.0, 0.0)), (j - 1, C64::new(1.0, 0.0))])?;
        let basis = gram_schmidt_complete(&known, d)?;
        let tag = format!("@{j}");
        let mut outcomes = Vec::new();
        let coeffs = {
            let mut prepared = PreparedInput::new(&mut oracle, input)?;
            coherences_against(&mut prepared, &basis, 0, C64::new(h, 0.0), j - 1, &tag, &mut outcomes)?
        };
        stage_counts.push(oracle.ledger().count() - before);

        let tail: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let reference_modulus = (1.0 - tail).max(0.0).sqrt();
        if (reference_modulus - h).abs() > REFERENCE_OVERLAP_TOL {
            if mode.is_exact() {
                return Err(Error::ReferenceOverlapDrift {
                    stage: j,
                    modulus: reference_modulus,
                });
            }
            warn!("aupt stage {j}: |<u0|phi>| = {reference_modulus:.4}, expected {h:.4}");
        }

        // u_{j-1} = sqrt2 phi' - u_0, and sqrt2 * (1/sqrt2) b_0 = u_0.
        let mut column = DVector::zeros(d);
        for (c, b) in coeffs.iter().zip(&basis[j - 1..]) {
            column += b * (*c * std::f64::consts::SQRT_2);
        }
        let norm = column.norm();
        if (norm - 1.0).abs() > column_bound {
            return Err(Error::ColumnNormDrift {
                column: j - 1,
                norm,
                bound: column_bound,
            });
        }
        known.push(orthonormalize_against(&column, &known)?);
        columns.push(column);
    }

    let raw = DMatrix::from_columns(&columns);
    let projected = nearest_unitary(&raw)?;
    let distance = (&raw - projected.matrix()).norm();
    if distance > NON_UNITARY_BOUND {
        return Err(Error::NonUnitaryResult(distance));
    }
    let measurement_count: usize = stage_counts.iter().sum();
    debug!(
        "aupt: d={d} count={measurement_count} raw deviation={:.3e}",
        unitarity_deviation(&raw)
    );
    Ok(AuptResult {
        unitary: projected.canonical(),
        raw,
        measurement_count,
        stage_counts,
        ledger: oracle.into_ledger(),
    })
}

fn orthonormalize_against(v: &DVector<C64>, known: &[DVector<C64>]) -> Result<DVector<C64>> {
    let mut w = v.clone();
    for _ in 0..2 {
        for k in known {
            let c = k.dotc(&w);
            w -= k * c;
        }
    }
    let n = w.norm();
    if n < 1e-8 {
        return Err(Error::Singular(n));
    }
    Ok(w / C64::new(n, 0.0))
}

/// `min_phi ||U - e^{i phi} V||_F`, via `|tr(U^dag V)|`.
pub fn unitary_distance(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    Ok(matrix_distance(u.matrix(), v.matrix()))
}

/// Phase-aligned Frobenius distance between arbitrary square matrices.
pub fn matrix_distance(u: &DMatrix<C64>, v: &DMatrix<C64>) -> f64 {
    let overlap = u.dotc(v);
    let phase = if overlap.norm() > 0.0 {
        C64::from_polar(1.0, -overlap.arg())
    } else {
        C64::new(1.0, 0.0)
    };
    (u - v * phase).norm()
}
