use alloc::string::String;

/// Errors raised by the solver pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is {rows}x{cols}; expected a square matrix of power-of-two dimension")]
    NotPowerOfTwo { rows: usize, cols: usize },

    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),

    #[error("term index {index} out of range for {len} terms")]
    TermOutOfRange { index: usize, len: usize },

    #[error("A|x> vanishes: the trial state is degenerate (norm^2 = {0:e})")]
    DegenerateState(f64),

    #[error("reference vector is identically zero")]
    ZeroReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;
