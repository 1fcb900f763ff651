use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("target qubit {index} out of range for {qubits} qubits")]
    TargetOutOfRange { index: usize, qubits: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{qubits} qubits exceeds the dense-simulation cap of {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("observable does not square to identity (max deviation {0:e})")]
    NotPlusMinusOne(f64),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("strategy alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("search space of {size} points exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bit strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("promise violated: {0}")]
    PromiseViolated(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-local box {0} was already used")]
    BoxReused(usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("incomplete conversation catalog: {0}")]
    IncompleteCatalog(String),
    #[error("alphabet too large: {0}")]
    AlphabetTooLarge(String),
    #[error("invalid density or decoder: {0}")]
    InvalidDensity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
