use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::statevector::MAX_QUBITS)]
    QubitCount(usize),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("CNOT control and target are both qubit {0}")]
    ControlIsTarget(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
    #[error("unknown infill pattern {0:?}")]
    UnknownPattern(String),
    #[error("invalid split: {0}")]
    Split(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("training targets are constant ({0}); output range is degenerate")]
    DegenerateTargets(f64),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("non-finite cost at iteration {iteration}; learning rate too large?")]
    Divergence { iteration: usize },

    #[error("length mismatch: {0} targets vs {1} predictions")]
    LengthMismatch(usize, usize),
    #[error("metric needs at least {0} samples")]
    TooFewSamples(usize),
    #[error("explained variance undefined: target variance is zero")]
    ZeroVariance,

    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Read { .. }
            | Error::Schema(_)
            | Error::Row { .. }
            | Error::UnknownPattern(_)
            | Error::Split(_)
            | Error::EmptyTrainingSet
            | Error::DegenerateTargets(_)
            | Error::Csv(_) => 2,
            Error::Divergence { .. } => 3,
            _ => 1,
        }
    }
}
