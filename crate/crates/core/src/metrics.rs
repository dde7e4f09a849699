//! Channel and state comparison metrics.
//!
//! The average gate fidelity is estimated by Monte Carlo: average
//! `<psi|U^dag L(|psi><psi|) U|psi>` over Haar-random `psi`, repeat, and
//! report the mean and spread across repetitions. The closed form for
//! unitary pairs is provided separately as a reference.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::HiddenChannel;
use crate::quantum::{haar_random_state_with, seeded_rng};
use crate::{PauliBasis, PauliTransferMatrix, PureState, UnitaryMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FidelityParams {
    #[serde(rename = "n")]
    pub n_samples_per_rep: usize,
    #[serde(rename = "reps")]
    pub n_reps: usize,
    pub seed: u64,
}

impl Default for FidelityParams {
    fn default() -> Self {
        Self {
            n_samples_per_rep: 1000,
            n_reps: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub mean: f64,
    /// Sample standard deviation of the per-repetition means.
    pub std: f64,
    #[serde(rename = "n")]
    pub n_samples_per_rep: usize,
    #[serde(rename = "reps")]
    pub n_reps: usize,
    pub seed: u64,
}

/// Monte Carlo average fidelity of `channel` against `target`. Repetition
/// `r` draws its states from seed `params.seed + r`.
pub fn average_fidelity_mc(
    channel: &HiddenChannel,
    target: &UnitaryMatrix,
    params: &FidelityParams,
) -> Result<FidelityEstimate> {
    let d = target.dim();
    if channel.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: channel.dim(),
        });
    }
    if params.n_samples_per_rep == 0 || params.n_reps == 0 {
        return Err(Error::InvalidNoise("fidelity sampling needs at least one sample and one repetition".into()));
    }
    let superop = match channel {
        HiddenChannel::Ptm(r) => Some(superoperator(r)?),
        HiddenChannel::Unitary(_) => None,
    };
    let rep_means: Vec<f64> = (0..params.n_reps)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut rng = seeded_rng(params.seed.wrapping_add(rep as u64));
            let mut sum = 0.0;
            for _ in 0..params.n_samples_per_rep {
                let psi: PureState = haar_random_state_with(d, &mut rng)?;
                sum += sample_fidelity(channel, superop.as_ref(), target, &psi);
            }
            Ok(sum / params.n_samples_per_rep as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, std) = mean_std(&rep_means);
    Ok(FidelityEstimate {
        mean,
        std,
        n_samples_per_rep: params.n_samples_per_rep,
        n_reps: params.n_reps,
        seed: params.seed,
    })
}

fn sample_fidelity(
    channel: &HiddenChannel,
    superop: Option<&DMatrix<C64>>,
    target: &UnitaryMatrix,
    psi: &PureState,
) -> f64 {
    let ideal = target.matrix() * psi.amplitudes();
    match channel {
        HiddenChannel::Unitary(u) => {
            let actual = u.matrix() * psi.amplitudes();
            ideal.dotc(&actual).norm_sqr()
        }
        HiddenChannel::Ptm(_) => {
            let d = ideal.len();
            let rho: DMatrix<C64> = psi.amplitudes() * psi.amplitudes().adjoint();
            let vec_rho = DVector::from_column_slice(rho.as_slice());
            let out = superop.expect("superoperator for PTM channel") * vec_rho;
            let out = DMatrix::from_column_slice(d, d, out.as_slice());
            ideal.dotc(&(out * &ideal)).re
        }
    }
}

/// Column-major `vec` representation: `S vec(rho) = vec(L(rho))`, i.e.
/// `S = V R V^dag / d` with the vectorized Paulis as the columns of `V`.
fn superoperator(r: &PauliTransferMatrix) -> Result<DMatrix<C64>> {
    let basis = PauliBasis::new(r.n_qubits());
    let d = r.dim();
    let mut v = DMatrix::<C64>::zeros(d * d, basis.len());
    for i in 0..basis.len() {
        v.set_column(i, &DVector::from_column_slice(basis.matrix(i).as_slice()));
    }
    let entries = r.entries().map(|x| C64::new(x, 0.0));
    Ok(&v * entries * v.adjoint() / C64::new(d as f64, 0.0))
}

/// Mean and sample standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `(d + |tr(U^dag V)|^2) / (d (d + 1))`.
pub fn average_fidelity_closed_form(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    let d = u.dim() as f64;
    let t = u.matrix().dotc(v.matrix()).norm_sqr();
    Ok((d + t) / (d * (d + 1.0)))
}

/// Exact average fidelity of a PTM channel against `target`, through the
/// process fidelity `tr(R_U^T R) / d^2`.
pub fn average_fidelity_ptm(ptm: &PauliTransferMatrix, target: &UnitaryMatrix) -> Result<f64> {
    if ptm.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: ptm.dim(),
        });
    }
    let ideal = crate::quantum::ptm_from_unitary(target, ptm.n_qubits())?;
    let d = target.dim() as f64;
    let process = ideal.entries().dot(ptm.entries()) / (d * d);
    Ok((d * process + 1.0) / (d + 1.0))
}

/// Average fidelity of `target` followed by depolarizing noise of strength
/// `p`, against `target`: `1 - p (1 - 1/d)`.
pub fn depolarized_average_fidelity(dim: usize, p: f64) -> f64 {
    1.0 - p * (1.0 - 1.0 / dim as f64)
}

/// `|<a|b>|^2`.
pub fn state_fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    a.fidelity(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_perfect() {
        let i = UnitaryMatrix::identity(4).unwrap();
        let est = average_fidelity_mc(&HiddenChannel::Unitary(i.clone()), &i, &FidelityParams {
            n_samples_per_rep: 200,
            n_reps: 10,
            seed: 1,
        })
        .unwrap();
        assert!((est.mean - 1.0).abs() < 1e-12);
        assert!(est.std <= 1e-12);
    }

    #[test]
    fn closed_form_values() {
        let i = UnitaryMatrix::identity(2).unwrap();
        assert!((average_fidelity_closed_form(&i, &crate::gates::identity2()).unwrap() - 1.0).abs() < 1e-15);
        let z = UnitaryMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ])))
        .unwrap();
        assert!((average_fidelity_closed_form(&i, &z).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((average_fidelity_closed_form(&i, &i.scaled_by_phase(0.7)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ptm_and_unitary_paths_agree() {
        let u = crate::gates::cnot12::<f64>();
        let ptm = crate::quantum::ptm_from_unitary(&u, 2).unwrap();
        let t = crate::gates::h1::<f64>();
        let params = FidelityParams {
            n_samples_per_rep: 50,
            n_reps: 4,
            seed: 9,
        };
        let a = average_fidelity_mc(&HiddenChannel::Unitary(u), &t, &params).unwrap();
        let b = average_fidelity_mc(&HiddenChannel::Ptm(ptm), &t, &params).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-12);
        let dep = PauliTransferMatrix::depolarizing(2, 0.1);
        assert!(average_fidelity_mc(&HiddenChannel::Ptm(dep), &UnitaryMatrix::identity(2).unwrap(), &params).is_err());
    }

    #[test]
    fn ptm_closed_form_matches_unitary_closed_form() {
        let u = crate::gates::cnot12::<f64>();
        let v = crate::gates::t2::<f64>();
        let ptm = crate::quantum::ptm_from_unitary(&u, 2).unwrap();
        let a = average_fidelity_ptm(&ptm, &v).unwrap();
        let b = average_fidelity_closed_form(&u, &v).unwrap();
        assert!((a - b).abs() < 1e-12);
        let dep = PauliTransferMatrix::depolarizing(2, 0.1);
        let f = average_fidelity_ptm(&dep, &UnitaryMatrix::identity(4).unwrap()).unwrap();
        assert!((f - depolarized_average_fidelity(4, 0.1)).abs() < 1e-12);
    }

    #[test]
    fn report_json_shape() {
        let est = FidelityEstimate {
            mean: 0.5,
            std: 0.1,
            n_samples_per_rep: 1000,
            n_reps: 100,
            seed: 3,
        };
        let v = serde_json::to_value(est).unwrap();
        assert_eq!(v, serde_json::json!({"mean": 0.5, "std": 0.1, "n": 1000, "reps": 100, "seed": 3}));
    }
}
