use thiserror::Error;

/// Errors surfaced by construction, algebra, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit operator")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("duplicate qubit index {qubit} in Pauli string")]
    DuplicateQubit { qubit: usize },

    #[error("operand qubit counts differ: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("{qubits} qubits exceeds the dense-matrix cap of {max} (set GADGETFORGE_MAX_QUBITS to raise)")]
    DimensionOverflow { qubits: usize, max: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error(
        "operator product has non-real Pauli coefficients (max imaginary part {max_imag:.3e})"
    )]
    NonRealCoefficients { max_imag: f64 },

    #[error("z = {z} collides with penalty level {level} (pole in the resolvent)")]
    PoleCollision { z: f64, level: f64 },

    #[error("singular block encountered while inverting the resolvent")]
    SingularBlock,

    #[error("penalty Hamiltonian is not diagonal in the computational basis")]
    NonDiagonalPenalty,

    #[error("interaction factors overlap on qubit {qubit}")]
    OverlappingSupports { qubit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("error profile is not monotone over the bracket; samples (delta, err): {samples:?}")]
    NonMonotoneProfile { samples: Vec<(f64, f64)> },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("series convergence condition violated: {0}")]
    ConvergenceCondition(String),

    #[error("target schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
