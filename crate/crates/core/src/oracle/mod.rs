//! Oracles hide a target state or channel and answer expectation-value
//! queries, exactly or with finite-shot noise. Every query appends one entry
//! to the session's [`MeasurementLedger`]; queries within a session are
//! strictly sequential.

mod ledger;
mod noise;
mod sampling;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use ledger::{LedgerEntry, MeasurementLedger};
pub use noise::NoiseConfig;

use crate::error::{Error, Result};
use crate::quantum::{random_hermitian_with, seeded_rng, trace_product, PauliString, SimRng};
use crate::{DensityMatrix, Observable, PauliBasis, PauliTransferMatrix, PureState, UnitaryMatrix, C64};

/// How an expectation value is estimated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMode {
    #[default]
    Exact,
    /// Sample mean over this many projective measurements.
    Shots(u64),
}

impl MeasurementMode {
    pub fn shots(&self) -> Option<u64> {
        match self {
            MeasurementMode::Exact => None,
            MeasurementMode::Shots(n) => Some(*n),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MeasurementMode::Exact)
    }

    fn validate(&self) -> Result<()> {
        if let MeasurementMode::Shots(0) = self {
            return Err(Error::InvalidNoise("shot count must be positive".into()));
        }
        Ok(())
    }
}

/// Anything a tomography step can ask for expectation values.
pub trait ExpectationOracle {
    fn dim(&self) -> usize;
    fn mode(&self) -> MeasurementMode;
    fn query(&mut self, obs: &Observable) -> Result<f64>;
    /// Number of queries issued so far in this session.
    fn query_count(&self) -> usize;
}

/// Shared measurement back end: estimation plus ledger bookkeeping.
#[derive(Debug, Clone)]
struct Session {
    mode: MeasurementMode,
    rng: SimRng,
    ledger: MeasurementLedger,
    pauli: Option<PauliBasis>,
}

impl Session {
    fn new(dim: usize, mode: MeasurementMode, seed: u64) -> Result<Self> {
        mode.validate()?;
        // Pauli bookkeeping for up to three qubits.
        let pauli = (dim.is_power_of_two() && dim <= 8).then(|| PauliBasis::new(dim.trailing_zeros() as usize));
        Ok(Self {
            mode,
            rng: seeded_rng(seed),
            ledger: MeasurementLedger::new(),
            pauli,
        })
    }

    fn estimate(&mut self, rho: &DMatrix<C64>, obs: &Observable) -> f64 {
        match self.mode {
            MeasurementMode::Exact => trace_product(rho, obs.matrix()).re,
            MeasurementMode::Shots(n) => {
                let dist = sampling::outcome_distribution(rho, obs);
                sampling::sample_mean(&dist, n, &mut self.rng)
            }
        }
    }

    fn record(&mut self, obs: &Observable, estimate: f64) {
        let pauli_support = match &self.pauli {
            Some(basis) => {
                let id = PauliString::identity(basis.n_qubits()).index();
                basis
                    .coefficients(obs.matrix())
                    .iter()
                    .enumerate()
                    .filter(|&(i, c)| i != id && c.abs() > 1e-12)
                    .map(|(i, _)| i)
                    .collect()
            }
            None => Vec::new(),
        };
        self.ledger.record(LedgerEntry {
            label: obs.label().to_string(),
            observable_hash: obs.fingerprint(),
            estimate,
            n_shots: self.mode.shots(),
            pauli_support,
        });
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Hides a state; answers `tr(rho O)` queries.
#[derive(Debug, Clone)]
pub struct StateOracle {
    hidden: DensityMatrix,
    session: Session,
}

impl StateOracle {
    pub fn new(hidden: DensityMatrix, mode: MeasurementMode, seed: u64) -> Result<Self> {
        let session = Session::new(hidden.dim(), mode, seed)?;
        Ok(Self { hidden, session })
    }

    pub fn from_pure(hidden: &PureState, mode: MeasurementMode, seed: u64) -> Result<Self> {
        Self::new(hidden.density_matrix(), mode, seed)
    }

    pub fn dim(&self) -> usize {
        self.hidden.dim()
    }

    pub fn mode(&self) -> MeasurementMode {
        self.session.mode
    }

    pub fn query(&mut self, obs: &Observable) -> Result<f64> {
        check_dim(self.dim(), obs.dim())?;
        let estimate = self.session.estimate(self.hidden.matrix(), obs);
        self.session.record(obs, estimate);
        Ok(estimate)
    }

    pub fn ledger(&self) -> &MeasurementLedger {
        &self.session.ledger
    }

    pub fn into_ledger(self) -> MeasurementLedger {
        self.session.ledger
    }
}

impl ExpectationOracle for StateOracle {
    fn dim(&self) -> usize {
        StateOracle::dim(self)
    }
    fn mode(&self) -> MeasurementMode {
        StateOracle::mode(self)
    }
    fn query(&mut self, obs: &Observable) -> Result<f64> {
        StateOracle::query(self, obs)
    }
    fn query_count(&self) -> usize {
        self.ledger().count()
    }
}

/// The channel a [`ChannelOracle`] hides.
#[derive(Debug, Clone, PartialEq)]
pub enum HiddenChannel {
    Unitary(UnitaryMatrix),
    Ptm(PauliTransferMatrix),
}

impl HiddenChannel {
    pub fn dim(&self) -> usize {
        match self {
            HiddenChannel::Unitary(u) => u.dim(),
            HiddenChannel::Ptm(r) => r.dim(),
        }
    }
}

impl From<UnitaryMatrix> for HiddenChannel {
    fn from(u: UnitaryMatrix) -> Self {
        HiddenChannel::Unitary(u)
    }
}

impl From<PauliTransferMatrix> for HiddenChannel {
    fn from(r: PauliTransferMatrix) -> Self {
        HiddenChannel::Ptm(r)
    }
}

/// Hides a channel; a query prepares a pure input, applies the channel and
/// measures one observable.
///
/// Noise model, in order: every preparation is followed by a random rotation
/// `exp(-i eps G)` with `eps ~ N(0, sigma)` and `G` a fresh random Hermitian
/// generator of unit spectral radius; each channel application is followed
/// by depolarizing noise; readout applies an independent bit flip to every
/// qubit with probability `spam_flip_p` (a cyclic shift for non-qubit
/// dimensions).
#[derive(Debug, Clone)]
pub struct ChannelOracle {
    hidden: HiddenChannel,
    noise: NoiseConfig,
    session: Session,
    ptm_basis: Option<PauliBasis>,
}

impl ChannelOracle {
    pub fn new(hidden: impl Into<HiddenChannel>, noise: NoiseConfig, mode: MeasurementMode, seed: u64) -> Result<Self> {
        noise.validate()?;
        let hidden = hidden.into();
        let ptm_basis = match &hidden {
            HiddenChannel::Ptm(r) => Some(PauliBasis::new(r.n_qubits())),
            HiddenChannel::Unitary(_) => None,
        };
        let session = Session::new(hidden.dim(), mode, seed)?;
        Ok(Self {
            hidden,
            noise,
            session,
            ptm_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.hidden.dim()
    }

    pub fn mode(&self) -> MeasurementMode {
        self.session.mode
    }

    pub fn noise(&self) -> NoiseConfig {
        self.noise
    }

    pub fn ledger(&self) -> &MeasurementLedger {
        &self.session.ledger
    }

    pub fn into_ledger(self) -> MeasurementLedger {
        self.session.ledger
    }

    /// Prepare `input`, apply the channel once, measure `obs`.
    pub fn query(&mut self, input: &PureState, obs: &Observable) -> Result<f64> {
        self.query_repeated(input, obs, 1)
    }

    /// As [`Self::query`] with the channel applied `applications` times
    /// before readout. Each application after the first is preceded by its
    /// own imperfect rotation.
    pub fn query_repeated(&mut self, input: &PureState, obs: &Observable, applications: usize) -> Result<f64> {
        check_dim(self.dim(), input.dim())?;
        check_dim(self.dim(), obs.dim())?;
        let estimate = self.single_preparation(input, obs, applications.max(1))?;
        self.session.record(obs, estimate);
        Ok(estimate)
    }

    /// Operator-valued input `sum_s w_s |psi_s><psi_s|`, realized as one
    /// preparation per term; the weighted sum of the estimates is returned
    /// and counted as a single experiment.
    pub fn query_operator_input(&mut self, terms: &[(f64, PureState)], obs: &Observable) -> Result<f64> {
        check_dim(self.dim(), obs.dim())?;
        let mut estimate = 0.0;
        for (w, psi) in terms {
            check_dim(self.dim(), psi.dim())?;
            estimate += w * self.single_preparation(psi, obs, 1)?;
        }
        self.session.record(obs, estimate);
        Ok(estimate)
    }

    fn single_preparation(&mut self, input: &PureState, obs: &Observable, applications: usize) -> Result<f64> {
        let prepared = self.jitter(input.amplitudes());
        let mut rho = &prepared * prepared.adjoint();
        for a in 0..applications {
            if a > 0 {
                let j = self.jitter_unitary();
                if let Some(j) = j {
                    rho = &j * rho * j.adjoint();
                }
            }
            rho = self.apply_channel(&rho)?;
            rho = depolarize(rho, self.noise.depolarizing_p);
        }
        rho = self.readout_flip(rho);
        Ok(self.session.estimate(&rho, obs))
    }

    fn apply_channel(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        match &self.hidden {
            HiddenChannel::Unitary(u) => Ok(u.matrix() * rho * u.matrix().adjoint()),
            HiddenChannel::Ptm(r) => r.apply(self.ptm_basis.as_ref().expect("basis for PTM channel"), rho),
        }
    }

    fn jitter_unitary(&mut self) -> Option<DMatrix<C64>> {
        let sigma = self.noise.rotation_error_sigma;
        if sigma == 0.0 {
            return None;
        }
        let rng = &mut self.session.rng;
        let eps = Normal::new(0.0, sigma).expect("finite sigma").sample(rng);
        let g = random_hermitian_with::<f64, _>(self.hidden.dim(), rng);
        Some(exp_i_hermitian(&g, -eps))
    }

    fn jitter(&mut self, psi: &DVector<C64>) -> DVector<C64> {
        match self.jitter_unitary() {
            Some(j) => j * psi,
            None => psi.clone(),
        }
    }

    fn readout_flip(&mut self, rho: DMatrix<C64>) -> DMatrix<C64> {
        let p = self.noise.spam_flip_p;
        if p == 0.0 {
            return rho;
        }
        let d = rho.nrows();
        let flips: Vec<DMatrix<C64>> = if d.is_power_of_two() {
            let n = d.trailing_zeros() as usize;
            (0..n).map(|q| bit_flip_operator(n, q)).collect()
        } else {
            vec![DMatrix::from_fn(d, d, |i, j| {
                if i == (j + 1) % d {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })]
        };
        flips.iter().fold(rho, |acc, f| {
            acc.clone() * C64::new(1.0 - p, 0.0) + (f * acc * f.adjoint()) * C64::new(p, 0.0)
        })
    }
}

/// A pure-state preparation bound to a channel oracle, so state tomography
/// can run on the channel's output.
pub struct PreparedInput<'a> {
    oracle: &'a mut ChannelOracle,
    input: PureState,
}

impl<'a> PreparedInput<'a> {
    pub fn new(oracle: &'a mut ChannelOracle, input: PureState) -> Result<Self> {
        check_dim(oracle.dim(), input.dim())?;
        Ok(Self { oracle, input })
    }
}

impl ExpectationOracle for PreparedInput<'_> {
    fn dim(&self) -> usize {
        self.oracle.dim()
    }
    fn mode(&self) -> MeasurementMode {
        self.oracle.mode()
    }
    fn query(&mut self, obs: &Observable) -> Result<f64> {
        self.oracle.query(&self.input, obs)
    }
    fn query_count(&self) -> usize {
        self.oracle.ledger().count()
    }
}

fn depolarize(rho: DMatrix<C64>, p: f64) -> DMatrix<C64> {
    if p == 0.0 {
        return rho;
    }
    let d = rho.nrows();
    rho * C64::new(1.0 - p, 0.0) + DMatrix::identity(d, d) * C64::new(p / d as f64, 0.0)
}

/// `exp(i t H)` for Hermitian `H`.
pub(crate) fn exp_i_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, t * l)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// `X` on qubit `q` (0 = most significant) of an `n`-qubit register.
fn bit_flip_operator(n: usize, q: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let mask = 1usize << (n - 1 - q);
    DMatrix::from_fn(d, d, |i, j| {
        if i == j ^ mask {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Draws a seed for a derived session from a parent generator.
pub fn derive_seed<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.random()
}
