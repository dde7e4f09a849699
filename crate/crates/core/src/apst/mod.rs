//! Adaptive pure-state tomography.
//!
//! Step 1 walks the populations `E_0, E_1, ...` until one is nonzero; that
//! index `k` becomes the reference, with a real positive amplitude. Step 2
//! reads the coherence of every later index against the reference. The
//! number of queries is `2d - k - 1`.

mod witness;

use log::{debug, warn};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use witness::{uda_witness_search, WitnessParams, WitnessReport};

use crate::error::{Error, Result};
use crate::oracle::{ExpectationOracle, MeasurementLedger, MeasurementMode, StateOracle};
use crate::quantum::canonical_vector;
use crate::{Observable, PureState, C64};

/// Tolerance on `sum |alpha_n|^2 - 1` before renormalization.
const NORM_BOUND_EXACT: f64 = 1e-6;
const NORM_BOUND_SHOTS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApstConfig {
    /// Population threshold in exact mode, and the floor under shots.
    pub zero_threshold_abs: f64,
    /// Standard errors a population must clear under shots.
    pub zero_threshold_sigmas: f64,
    /// Expected dimension; checked against the oracle when set.
    pub dim: Option<usize>,
}

impl Default for ApstConfig {
    fn default() -> Self {
        Self {
            zero_threshold_abs: 1e-7,
            zero_threshold_sigmas: 5.0,
            dim: None,
        }
    }
}

impl ApstConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.zero_threshold_abs > 0.0 && self.zero_threshold_abs.is_finite()) {
            return Err(Error::InvalidNoise(format!(
                "zero_threshold_abs must be positive, got {}",
                self.zero_threshold_abs
            )));
        }
        if !(self.zero_threshold_sigmas > 0.0 && self.zero_threshold_sigmas.is_finite()) {
            return Err(Error::InvalidNoise(format!(
                "zero_threshold_sigmas must be positive, got {}",
                self.zero_threshold_sigmas
            )));
        }
        Ok(())
    }

    /// Threshold a population estimate `p` must exceed to count as nonzero.
    pub fn threshold(&self, p: f64, mode: MeasurementMode) -> f64 {
        match mode {
            MeasurementMode::Exact => self.zero_threshold_abs,
            MeasurementMode::Shots(n) => {
                let p = p.clamp(0.0, 1.0);
                let se = (p * (1.0 - p) / n as f64).sqrt();
                self.zero_threshold_abs.max(self.zero_threshold_sigmas * se)
            }
        }
    }

    fn norm_bound(mode: MeasurementMode) -> f64 {
        if mode.is_exact() {
            NORM_BOUND_EXACT
        } else {
            NORM_BOUND_SHOTS
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApstResult {
    pub state: PureState,
    pub k: usize,
    pub measurement_count: usize,
    pub ledger: MeasurementLedger,
    /// The queried observables with their estimates, in query order.
    pub outcomes: Vec<(Observable, f64)>,
}

impl ApstResult {
    pub fn to_json(&self, hidden: Option<&PureState>) -> Result<serde_json::Value> {
        let mut v = serde_json::json!({
            "k": self.k,
            "count": self.measurement_count,
            "state": serde_json::to_value(&self.state)?,
        });
        if let Some(h) = hidden {
            v["fidelity_vs_hidden"] = serde_json::json!(self.state.fidelity(h)?);
        }
        Ok(v)
    }
}

/// Reconstruct the oracle's hidden state; consumes the session.
pub fn apst_reconstruct(mut oracle: StateOracle, config: &ApstConfig) -> Result<ApstResult> {
    let estimate = apst_reconstruct_with(&mut oracle, config)?;
    Ok(ApstResult {
        state: estimate.state,
        k: estimate.k,
        measurement_count: estimate.measurement_count,
        ledger: oracle.into_ledger(),
        outcomes: estimate.outcomes,
    })
}

/// Reconstruction without the ledger, for any expectation oracle.
#[derive(Debug, Clone)]
pub struct ApstEstimate {
    pub state: PureState,
    pub k: usize,
    pub measurement_count: usize,
    pub outcomes: Vec<(Observable, f64)>,
}

pub fn apst_reconstruct_with<O: ExpectationOracle + ?Sized>(oracle: &mut O, config: &ApstConfig) -> Result<ApstEstimate> {
    config.validate()?;
    let d = oracle.dim();
    if let Some(expected) = config.dim {
        if expected != d {
            return Err(Error::DimensionMismatch { expected, actual: d });
        }
    }
    let basis: Vec<DVector<C64>> = (0..d).map(|i| canonical_vector(d, i)).collect();
    let mut outcomes = Vec::with_capacity(2 * d);
    let start = oracle.query_count();

    let (k, alpha_k) = locate_reference(oracle, &basis, config, "", &mut outcomes)?;
    let mut amps = DVector::zeros(d);
    amps[k] = C64::new(alpha_k, 0.0);
    let coherences = coherences_against(oracle, &basis, k, C64::new(alpha_k, 0.0), k + 1, "", &mut outcomes)?;
    for (n, a) in (k + 1..d).zip(coherences) {
        amps[n] = a;
    }

    let norm_sq = amps.norm_squared();
    let bound = ApstConfig::norm_bound(oracle.mode());
    if (norm_sq - 1.0).abs() > bound {
        return Err(Error::NormalizationDrift { norm_sq, bound });
    }
    let state = PureState::normalized(amps)?;
    let measurement_count = oracle.query_count() - start;
    debug!("apst: d={d} k={k} count={measurement_count}");
    Ok(ApstEstimate {
        state,
        k,
        measurement_count,
        outcomes,
    })
}

/// Step 1 in an arbitrary orthonormal basis: query the populations of
/// `basis[0], basis[1], ...` until one clears the threshold. Returns the
/// index and the reference amplitude `sqrt(p)`.
pub(crate) fn locate_reference<O: ExpectationOracle + ?Sized>(
    oracle: &mut O,
    basis: &[DVector<C64>],
    config: &ApstConfig,
    tag: &str,
    outcomes: &mut Vec<(Observable, f64)>,
) -> Result<(usize, f64)> {
    for (k, b) in basis.iter().enumerate() {
        let obs = Observable::new(b * b.adjoint(), format!("E{k}{tag}"))?;
        let p = oracle.query(&obs)?;
        outcomes.push((obs, p));
        let threshold = config.threshold(p, oracle.mode());
        if p > threshold {
            return Ok((k, p.max(threshold).sqrt()));
        }
    }
    Err(Error::AllAmplitudesBelowThreshold)
}

/// Step 2 in an arbitrary orthonormal basis: amplitudes on
/// `basis[from..]` relative to the known reference amplitude on
/// `basis[reference]`, two queries per index.
pub(crate) fn coherences_against<O: ExpectationOracle + ?Sized>(
    oracle: &mut O,
    basis: &[DVector<C64>],
    reference: usize,
    reference_amp: C64,
    from: usize,
    tag: &str,
    outcomes: &mut Vec<(Observable, f64)>,
) -> Result<Vec<C64>> {
    let mut amps = Vec::with_capacity(basis.len().saturating_sub(from));
    for n in from..basis.len() {
        let (x, y) = Observable::coherence_pair(&basis[reference], &basis[n]);
        let x = x.with_label(format!("X{reference},{n}{tag}"));
        let y = y.with_label(format!("Y{reference},{n}{tag}"));
        let ex = oracle.query(&x)?;
        let ey = oracle.query(&y)?;
        outcomes.push((x, ex));
        outcomes.push((y, ey));
        // <X> + i<Y> = 2 conj(a_ref) a_n
        amps.push(C64::new(ex, ey) / (reference_amp.conj() * 2.0));
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        warn!("non-finite coherence amplitude");
    }
    Ok(amps)
}
