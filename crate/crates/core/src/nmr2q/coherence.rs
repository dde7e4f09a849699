//! Coherence readout between two basis elements of a channel output, with
//! the double-application route for coherences a spin-1/2 pair cannot
//! observe directly.

use crate::error::Result;
use crate::oracle::ChannelOracle;
use crate::{Observable, PureState, UnitaryMatrix, C64};

/// Number of qubits that flip between basis states `i` and `j`; coherences
/// of order 1 are directly observable.
pub fn coherence_order(i: usize, j: usize) -> u32 {
    (i ^ j).count_ones()
}

pub fn is_double_coherence(i: usize, j: usize) -> bool {
    coherence_order(i, j) == 2
}

/// Directly read `conj(A_i) A_j` of the output for `input` (two queries).
pub fn direct_coherence(oracle: &mut ChannelOracle, input: &PureState, (i, j): (usize, usize)) -> Result<C64> {
    let x = Observable::coherence_x(oracle.dim(), i, j)?;
    let y = Observable::coherence_y(oracle.dim(), i, j)?;
    let ex = oracle.query(input, &x)?;
    let ey = oracle.query(input, &y)?;
    Ok(C64::new(ex, ey) / 2.0)
}

/// `conj(A_i) A_j` of the single-application output, read after a second
/// application of the channel. The readout observables are the coherence
/// observables mapped through the expected gate `target`, so the estimate
/// is exact when the hidden channel equals `target` (two queries).
pub fn coherence_after_second_application(
    oracle: &mut ChannelOracle,
    input: &PureState,
    target: &UnitaryMatrix,
    (i, j): (usize, usize),
) -> Result<C64> {
    let d = oracle.dim();
    let x = Observable::coherence_x(d, i, j)?;
    let y = Observable::coherence_y(d, i, j)?;
    let x2 = x.conjugated_by(target)?.with_label(format!("X{i},{j}^2"));
    let y2 = y.conjugated_by(target)?.with_label(format!("Y{i},{j}^2"));
    let ex = oracle.query_repeated(input, &x2, 2)?;
    let ey = oracle.query_repeated(input, &y2, 2)?;
    Ok(C64::new(ex, ey) / 2.0)
}

/// Relative phase `arg(conj(A_i) A_j)` of the channel output for `input`,
/// obtained by applying the channel twice before readout.
pub fn double_coherence_workaround(
    oracle: &mut ChannelOracle,
    input: &PureState,
    target: &UnitaryMatrix,
    pair: (usize, usize),
) -> Result<f64> {
    Ok(coherence_after_second_application(oracle, input, target, pair)?.arg())
}
