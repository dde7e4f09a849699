//! Two-qubit adaptive unitary tomography under spin-readout constraints.
//!
//! Each column of `V` is read from its basis input: three populations plus
//! normalization give the moduli, and six coherence observables against
//! the largest element give the phases (9 x 4 = 36 experiments). Three
//! superposed inputs then fix the phases between columns (6 experiments).

mod coherence;
mod phase;
mod pulse;

use log::{info, warn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use coherence::{
    coherence_after_second_application, coherence_order, direct_coherence, double_coherence_workaround,
    is_double_coherence,
};
pub use phase::{interference, phase_roots, phase_solve, phase_solve_with, wrap_angle, PhaseCheck};
pub use pulse::{compile_pulse_sequence, free_evolution, rotation, Axis, GateLibrary, PulseSeq, PulseTerm, DEFAULT_J_HZ};

use crate::error::{Error, Result};
use crate::oracle::{ChannelOracle, MeasurementLedger};
use crate::quantum::nearest_unitary;
use crate::{Observable, PureState, UnitaryMatrix, C64};

const DIM: usize = 4;
/// Moduli closer than this tie for the reference element.
const REFERENCE_TIE_TOL: f64 = 1e-9;
/// Interference strength below which an observable pair is not used.
const SCORE_THRESHOLD: f64 = 0.05;
/// Measured `|conj(A_i) A_j|` below which the phase is not trusted.
const MIN_COHERENCE: f64 = 1e-3;

/// Moduli and phases of one column, phases relative to the reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnData {
    pub moduli: Vec<f64>,
    /// Phases of the non-reference elements, in index order.
    pub intra_phases: Vec<f64>,
    pub reference_index: usize,
    /// Another modulus tied with the reference.
    pub reference_tie: bool,
}

impl ColumnData {
    pub fn amplitudes(&self) -> DVector<C64> {
        let mut phases = self.intra_phases.iter();
        DVector::from_fn(self.moduli.len(), |i, _| {
            let phi = if i == self.reference_index {
                0.0
            } else {
                *phases.next().expect("one phase per element")
            };
            C64::from_polar(self.moduli[i], phi)
        })
    }
}

/// How an inter-column phase was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMethod {
    /// Relative phase of one coherence, inverted by [`phase_solve`].
    PhaseSolve,
    /// Two expectation values solved as a linear system in `e^{i theta}`.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterColumnPhase {
    pub columns: (usize, usize),
    /// Phase of column `b` relative to column `a`.
    pub theta: f64,
    pub observables: (String, String),
    pub method: PhaseMethod,
    /// Read after a second application of the channel.
    pub second_application: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NmrConfig {
    /// Amplitudes `(w0, w1)` of the superposed input `w0|a> + w1|b>`.
    pub weights: (f64, f64),
    /// Column pairs probed by superposed inputs; must connect all columns.
    pub pairs: Vec<(usize, usize)>,
    /// Expected gate, used to map double coherences back to single ones
    /// through a second application. Without it double coherences are read
    /// directly.
    #[serde(skip)]
    pub target: Option<UnitaryMatrix>,
}

impl Default for NmrConfig {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            weights: (h, h),
            pairs: vec![(0, 1), (0, 2), (0, 3)],
            target: None,
        }
    }
}

impl NmrConfig {
    /// Inputs `(|a> + sqrt3 |b>)/2` on column pairs (0,1), (0,2), (2,3).
    pub fn lab_inputs() -> Self {
        Self {
            weights: (0.5, 3f64.sqrt() / 2.0),
            pairs: vec![(0, 1), (0, 2), (2, 3)],
            target: None,
        }
    }

    pub fn with_target(mut self, target: UnitaryMatrix) -> Self {
        self.target = Some(target);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (w0, w1) = self.weights;
        if !(w0 > 0.0 && w1 > 0.0) || (w0 * w0 + w1 * w1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidNoise(format!("superposition weights {w0}, {w1} are not normalized")));
        }
        if self.pairs.len() != DIM - 1 {
            return Err(Error::InvalidNoise(format!("need {} column pairs", DIM - 1)));
        }
        let mut component: Vec<usize> = (0..DIM).collect();
        for &(a, b) in &self.pairs {
            if a == b || a >= DIM || b >= DIM {
                return Err(Error::InvalidPair(a, b));
            }
            let (ca, cb) = (component[a], component[b]);
            if ca == cb {
                return Err(Error::InvalidNoise(format!("column pairs form a cycle at ({a}, {b})")));
            }
            component.iter_mut().filter(|c| **c == cb).for_each(|c| *c = ca);
        }
        if let Some(t) = &self.target {
            if t.dim() != DIM {
                return Err(Error::DimensionMismatch {
                    expected: DIM,
                    actual: t.dim(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NmrResult {
    /// Polar projection of `raw`, global phase canonicalized.
    pub unitary: UnitaryMatrix,
    pub raw: DMatrix<C64>,
    pub columns: Vec<ColumnData>,
    pub inter_column: Vec<InterColumnPhase>,
    pub measurement_count: usize,
    pub ledger: MeasurementLedger,
}

impl NmrResult {
    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "count": self.measurement_count,
            "pauli_settings": self.ledger.pauli_settings(),
            "columns": self.columns,
            "inter_column": self.inter_column,
            "raw": crate::quantum::UnitaryJson::from_matrix(&self.raw),
            "unitary": serde_json::to_value(&self.unitary)?,
        }))
    }
}

/// Reconstruct the oracle's hidden two-qubit unitary; consumes the session.
pub fn nmr_aupt_reconstruct(mut oracle: ChannelOracle, config: &NmrConfig) -> Result<NmrResult> {
    config.validate()?;
    if oracle.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            actual: oracle.dim(),
        });
    }
    let exact = oracle.mode().is_exact();

    let mut columns = Vec::with_capacity(DIM);
    for c in 0..DIM {
        columns.push(measure_column(&mut oracle, c)?);
    }
    let vectors: Vec<DVector<C64>> = columns.iter().map(ColumnData::amplitudes).collect();

    let mut inter_column = Vec::with_capacity(DIM - 1);
    for &pair in &config.pairs {
        inter_column.push(measure_inter_column(&mut oracle, config, &vectors, pair, exact)?);
    }

    let mut phases: Vec<Option<f64>> = vec![None; DIM];
    phases[0] = Some(0.0);
    while phases.iter().any(Option::is_none) {
        for p in &inter_column {
            let (a, b) = p.columns;
            match (phases[a], phases[b]) {
                (Some(pa), None) => phases[b] = Some(pa + p.theta),
                (None, Some(pb)) => phases[a] = Some(pb - p.theta),
                _ => {}
            }
        }
    }
    let raw_columns: Vec<DVector<C64>> = vectors
        .iter()
        .zip(&phases)
        .map(|(v, phi)| v * C64::from_polar(1.0, phi.expect("all phases assigned")))
        .collect();
    let raw = DMatrix::from_columns(&raw_columns);
    let unitary = nearest_unitary(&raw)?.canonical();
    let measurement_count = oracle.ledger().count();
    Ok(NmrResult {
        unitary,
        raw,
        columns,
        inter_column,
        measurement_count,
        ledger: oracle.into_ledger(),
    })
}

fn measure_column(oracle: &mut ChannelOracle, c: usize) -> Result<ColumnData> {
    let input = PureState::basis(DIM, c)?;
    let mut populations = Vec::with_capacity(DIM);
    for i in 0..DIM - 1 {
        let obs = Observable::projector(DIM, i)?;
        let obs = obs.clone().with_label(format!("{}@c{c}", obs.label()));
        populations.push(oracle.query(&input, &obs)?);
    }
    populations.push(1.0 - populations.iter().sum::<f64>());
    let moduli: Vec<f64> = populations.iter().map(|p| p.max(0.0).sqrt()).collect();

    let max = moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reference_index = moduli
        .iter()
        .position(|&m| max - m <= REFERENCE_TIE_TOL)
        .expect("nonempty column");
    let reference_tie = moduli
        .iter()
        .enumerate()
        .any(|(i, &m)| i != reference_index && max - m <= REFERENCE_TIE_TOL);
    if reference_tie {
        info!("column {c}: reference modulus tie, using element {reference_index}");
    }

    let mut intra_phases = Vec::with_capacity(DIM - 1);
    for i in (0..DIM).filter(|&i| i != reference_index) {
        let x = Observable::coherence_x(DIM, reference_index, i)?;
        let y = Observable::coherence_y(DIM, reference_index, i)?;
        let x = x.clone().with_label(format!("{}@c{c}", x.label()));
        let y = y.clone().with_label(format!("{}@c{c}", y.label()));
        let ex = oracle.query(&input, &x)?;
        let ey = oracle.query(&input, &y)?;
        intra_phases.push(ey.atan2(ex));
    }
    Ok(ColumnData {
        moduli,
        intra_phases,
        reference_index,
        reference_tie,
    })
}

/// `kappa_O = 2 w0 w1 <alpha|O|beta>`: the measured value of `O` is
/// `const + Re(kappa_O e^{i theta})`.
fn kappa(obs: &Observable, alpha: &DVector<C64>, beta: &DVector<C64>, w0: f64, w1: f64) -> C64 {
    alpha.dotc(&(obs.matrix() * beta)) * (2.0 * w0 * w1)
}

fn constant(obs: &Observable, alpha: &DVector<C64>, beta: &DVector<C64>, w0: f64, w1: f64) -> f64 {
    w0 * w0 * alpha.dotc(&(obs.matrix() * alpha)).re + w1 * w1 * beta.dotc(&(obs.matrix() * beta)).re
}

/// How well two observables pin down `e^{i theta}`.
fn pair_score(k1: C64, k2: C64) -> f64 {
    (k1.conj() * k2).im.abs()
}

struct Probe {
    first: Observable,
    second: Observable,
    /// Coherence pair when the probes are its X/Y observables.
    coherence: Option<(usize, usize)>,
    score: f64,
}

fn measure_inter_column(
    oracle: &mut ChannelOracle,
    config: &NmrConfig,
    vectors: &[DVector<C64>],
    (a, b): (usize, usize),
    exact: bool,
) -> Result<InterColumnPhase> {
    let (w0, w1) = config.weights;
    let (alpha, beta) = (&vectors[a], &vectors[b]);
    let input = PureState::superposition(DIM, &[(a, C64::new(w0, 0.0)), (b, C64::new(w1, 0.0))])?;
    let tag = format!("@s{a}{b}");

    let coherence_probe = |i: usize, j: usize| -> Result<Probe> {
        let x = Observable::coherence_x(DIM, i, j)?;
        let y = Observable::coherence_y(DIM, i, j)?;
        let score = pair_score(kappa(&x, alpha, beta, w0, w1), kappa(&y, alpha, beta, w0, w1));
        Ok(Probe {
            first: x,
            second: y,
            coherence: Some((i, j)),
            score,
        })
    };
    let best = |probes: Vec<Probe>| probes.into_iter().reduce(|p, q| if q.score > p.score { q } else { p });

    let mut singles = Vec::new();
    let mut doubles = Vec::new();
    for i in 0..DIM {
        for j in i + 1..DIM {
            if is_double_coherence(i, j) {
                doubles.push(coherence_probe(i, j)?);
            } else {
                singles.push(coherence_probe(i, j)?);
            }
        }
    }
    let single = best(singles).expect("single coherences exist");
    let double = best(doubles).expect("double coherences exist");

    let (probe, second_application) = if single.score >= SCORE_THRESHOLD {
        (single, false)
    } else if double.score >= SCORE_THRESHOLD {
        let twice = config.target.is_some();
        if !twice {
            info!("columns ({a}, {b}): reading a double coherence directly");
        }
        (double, twice)
    } else {
        (fallback_probe(alpha, beta, w0, w1)?, false)
    };

    let labels = (
        format!("{}{tag}", probe.first.label()),
        format!("{}{tag}", probe.second.label()),
    );
    let (m1, m2) = if second_application {
        let target = config.target.as_ref().expect("target present");
        let (i, j) = probe.coherence.expect("coherence probe");
        let g = coherence_after_second_application(oracle, &input, target, (i, j))?;
        (2.0 * g.re, 2.0 * g.im)
    } else {
        let first = probe.first.clone().with_label(labels.0.clone());
        let second = probe.second.clone().with_label(labels.1.clone());
        (oracle.query(&input, &first)?, oracle.query(&input, &second)?)
    };

    let linear = || solve_linear(&probe, (m1, m2), alpha, beta, w0, w1);
    let (theta, method) = match probe.coherence {
        Some(pair) if (m1 * m1 + m2 * m2).sqrt() / 2.0 > MIN_COHERENCE => {
            let wa: Vec<C64> = alpha.iter().map(|v| v * w0).collect();
            let wb: Vec<C64> = beta.iter().map(|v| v * w1).collect();
            let g = C64::new(m1, m2) / 2.0;
            let check = [PhaseCheck::Modulus {
                pair,
                modulus: g.norm(),
            }];
            match phase_solve_with(&wa, &wb, g.arg(), pair, &check) {
                Ok(theta) => (theta, PhaseMethod::PhaseSolve),
                Err(e) if !exact => {
                    warn!("columns ({a}, {b}): {e}; solving linearly");
                    (linear()?, PhaseMethod::Linear)
                }
                Err(e) => return Err(e),
            }
        }
        _ => (linear()?, PhaseMethod::Linear),
    };
    Ok(InterColumnPhase {
        columns: (a, b),
        theta: wrap_angle(theta),
        observables: labels,
        method,
        second_application,
    })
}

/// Best-conditioned pair among populations and single coherences.
fn fallback_probe(alpha: &DVector<C64>, beta: &DVector<C64>, w0: f64, w1: f64) -> Result<Probe> {
    let mut candidates = Vec::new();
    for i in 0..DIM {
        candidates.push(Observable::projector(DIM, i)?);
    }
    for i in 0..DIM {
        for j in i + 1..DIM {
            if !is_double_coherence(i, j) {
                candidates.push(Observable::coherence_x(DIM, i, j)?);
                candidates.push(Observable::coherence_y(DIM, i, j)?);
            }
        }
    }
    let kappas: Vec<C64> = candidates.iter().map(|o| kappa(o, alpha, beta, w0, w1)).collect();
    let mut best = (0, 1, f64::NEG_INFINITY);
    for p in 0..candidates.len() {
        for q in p + 1..candidates.len() {
            let s = pair_score(kappas[p], kappas[q]);
            if s > best.2 {
                best = (p, q, s);
            }
        }
    }
    if best.2 <= 1e-9 {
        return Err(Error::PhaseSolveNoSolution(f64::NAN));
    }
    Ok(Probe {
        first: candidates[best.0].clone(),
        second: candidates[best.1].clone(),
        coherence: None,
        score: best.2,
    })
}

fn solve_linear(
    probe: &Probe,
    (m1, m2): (f64, f64),
    alpha: &DVector<C64>,
    beta: &DVector<C64>,
    w0: f64,
    w1: f64,
) -> Result<f64> {
    let k1 = kappa(&probe.first, alpha, beta, w0, w1);
    let k2 = kappa(&probe.second, alpha, beta, w0, w1);
    let r1 = m1 - constant(&probe.first, alpha, beta, w0, w1);
    let r2 = m2 - constant(&probe.second, alpha, beta, w0, w1);
    // r = Re(k) x - Im(k) y with z = x + iy
    let det = -k1.re * k2.im + k1.im * k2.re;
    if det.abs() <= 1e-12 {
        return Err(Error::PhaseSolveNoSolution(f64::NAN));
    }
    let x = (r1 * -k2.im - -k1.im * r2) / det;
    let y = (k1.re * r2 - k2.re * r1) / det;
    Ok(y.atan2(x))
}
