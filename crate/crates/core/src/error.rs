use thiserror::Error;

/// Errors raised by the linear-algebra layer and the tomography protocols.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension {0} exceeds the supported envelope of 64")]
    DimensionTooLarge(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (|U^dag U - I|_F = {0:e})")]
    NotUnitary(f64),
    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),
    #[error("input vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix is singular (smallest singular value {0:e})")]
    Singular(f64),
    #[error("invalid noise configuration: {0}")]
    InvalidNoise(String),
    #[error("AllAmplitudesBelowThreshold: no basis population exceeded the zero threshold")]
    AllAmplitudesBelowThreshold,
    #[error("NormalizationDrift: reconstructed norm^2 {norm_sq} deviates from 1 by more than {bound}")]
    NormalizationDrift { norm_sq: f64, bound: f64 },
    #[error("ColumnNormDrift: column {column} has norm {norm}, bound {bound}")]
    ColumnNormDrift { column: usize, norm: f64, bound: f64 },
    #[error("ReferenceOverlapDrift: stage {stage} overlap with first column is {modulus}, expected 1/sqrt(2)")]
    ReferenceOverlapDrift { stage: usize, modulus: f64 },
    #[error("NonUnitaryResult: raw matrix is {0} from its polar factor")]
    NonUnitaryResult(f64),
    #[error("PhaseSolveNoSolution: no root brackets the measured phase {0}")]
    PhaseSolveNoSolution(f64),
    #[error("AmbiguousSolution: roots {0} and {1} are equally consistent")]
    AmbiguousSolution(f64, f64),
    #[error("invalid element pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("unsupported qubit index {0}; pulse sequences address qubits 1 and 2")]
    UnsupportedQubit(usize),
    #[error("invalid pulse term: {0}")]
    InvalidPulse(String),
    #[error("unknown gate '{0}'")]
    UnknownGate(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
