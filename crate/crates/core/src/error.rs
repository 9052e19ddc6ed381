use thiserror::Error;

/// Errors produced by circuit handling, the oracle and the search driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown gate `{mnemonic}`")]
    UnknownGate { line: usize, mnemonic: String },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("simulating {n_qubits} qubits exceeds the configured cap of {max_qubits}")]
    Resource { n_qubits: usize, max_qubits: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operator {0} is not diagonal in the computational basis")]
    NonDiagonal(String),

    #[error("invalid Pauli string `{0}`")]
    InvalidPauli(String),

    #[error("pauli string {0} is outside the test family")]
    OutsideFamily(String),

    #[error("compact specification has no recorded outcomes")]
    EmptySpec,

    #[error("invalid test case: {0}")]
    InvalidTestCase(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("execution failed: {0}")]
    Execution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
