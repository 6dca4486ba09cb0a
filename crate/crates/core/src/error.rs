use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator size mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),

    #[error("qubit index {index} out of range for {n} qubits (indices are 1-based)")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("at most {max} qubits supported, got {n}")]
    TooManyQubits { n: usize, max: usize },

    #[error("evolution generator must carry canonical phase +1, got i^{phase_exponent}")]
    NonCanonicalPhase { phase_exponent: u8 },

    #[error("a Pauli-sum coefficient became imaginary; the sum is no longer Hermitian")]
    ImaginaryCoefficient,

    #[error("malformed elementary operation: {0}")]
    MalformedOp(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown code name: {0}")]
    UnknownCode(String),

    #[error("code {code} has no {kind} derivation chain")]
    MissingChain { code: String, kind: String },

    #[error("chain for {code}/{kind} failed verification at line {line}; compile refused")]
    UnverifiedChain { code: String, kind: String, line: usize },

    #[error("unsupported lattice geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("generator acts as {found} on qubit {qubit}; expected X or Y")]
    NotModifiable { qubit: usize, found: char },

    #[error("modified-generator ordering violated: factor {j} needs qubit {qubit} untouched, but an earlier factor acts on it with X or Y")]
    OrderingViolation { j: usize, qubit: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
