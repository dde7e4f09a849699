//! Standard process tomography in the Pauli representation.
//!
//! Every input Pauli `P_i` is prepared through its eigenstate decomposition
//! and every non-identity output Pauli is read out, giving `4^n (4^n - 1)`
//! experiments. The identity output row follows from trace preservation.

use log::debug;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oracle::{ChannelOracle, MeasurementLedger};
use crate::quantum::{qubit_count, PauliString};
use crate::{Observable, PauliTransferMatrix};

/// The experiment schedule: every input Pauli against every non-identity
/// readout Pauli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QptPlan {
    pub n_qubits: usize,
    pub inputs: Vec<PauliString>,
    pub readouts: Vec<PauliString>,
}

impl QptPlan {
    pub fn new(n_qubits: usize) -> Self {
        let inputs = PauliString::all(n_qubits);
        let readouts = inputs.iter().filter(|p| !p.is_identity()).cloned().collect();
        Self {
            n_qubits,
            inputs,
            readouts,
        }
    }

    pub fn settings(&self) -> usize {
        self.inputs.len() * self.readouts.len()
    }
}

#[derive(Debug, Clone)]
pub struct QptResult {
    pub ptm: PauliTransferMatrix,
    pub measurement_count: usize,
    pub ledger: MeasurementLedger,
}

/// Reconstruct the PTM of the oracle's channel; consumes the session.
pub fn stdqpt_reconstruct(mut oracle: ChannelOracle, n_qubits: usize) -> Result<QptResult> {
    let n = qubit_count(oracle.dim())?;
    if n != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            actual: oracle.dim(),
        });
    }
    let plan = QptPlan::new(n);
    let d = oracle.dim() as f64;
    let size = plan.inputs.len();
    let identity = PauliString::identity(n).index();
    let readouts: Vec<(usize, Observable)> = plan
        .readouts
        .iter()
        .map(|p| (p.index(), Observable::from_pauli(p)))
        .collect();

    let mut entries = DMatrix::zeros(size, size);
    for input in &plan.inputs {
        let i = input.index();
        let terms = input.eigenstate_decomposition::<f64>();
        // tr(P_i) / 2^n on the identity output
        entries[(identity, i)] = if input.is_identity() { 1.0 } else { 0.0 };
        for (j, obs) in &readouts {
            let value = oracle.query_operator_input(&terms, obs)?;
            entries[(*j, i)] = value / d;
        }
    }
    let measurement_count = oracle.ledger().count();
    debug!("stdqpt: n={n} settings={measurement_count}");
    Ok(QptResult {
        ptm: PauliTransferMatrix::from_entries(n, entries)?,
        measurement_count,
        ledger: oracle.into_ledger(),
    })
}
