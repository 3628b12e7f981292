use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix has {got} entries, expected {expected}")]
    BadMatrixShape { expected: usize, got: usize },

    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} used more than once")]
    DuplicateQubit(usize),

    #[error("query register has {got} qubits but oracle expects {expected}")]
    RegisterSize { expected: usize, got: usize },

    #[error("invalid bitstring {0:?}")]
    InvalidBitstring(String),

    #[error("invalid oracle: {0}")]
    InvalidOracle(String),

    #[error("oracle table is not a permutation")]
    NotPermutation,

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
