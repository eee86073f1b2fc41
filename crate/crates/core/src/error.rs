use alloc::string::String;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("wire {wire} out of range for {n_wires} wires")]
    WireOutOfRange { wire: usize, n_wires: usize },
    #[error("duplicate wire {0} in selection")]
    DuplicateWire(usize),
    #[error("invalid dimension {0}: local dimensions must be at least 2")]
    InvalidDimension(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operator is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("operator is not hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("channel is not CPTP: {0}")]
    NotCptp(String),
    #[error("program is not the Choi state of a trace-preserving channel (tail marginal deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("matrix is not column stochastic: {0}")]
    NotStochastic(String),
    #[error("projection has zero probability")]
    ZeroProbability,
    #[error("heralded failure after {attempts} attempts")]
    HeraldedFailure { attempts: usize },
    #[error("unresolved non-Pauli byproduct on wire {0}")]
    UnresolvedResidual(usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("missing program: {0}")]
    MissingProgram(String),
    #[error("bipartition metadata is missing or inconsistent")]
    MissingBipartition,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("covariant POVM rejected: completeness residual {0:e} above threshold")]
    PovmRejected(f64),
    #[error("optimizer did not converge after {iterations} iterations (best fidelity {best_fidelity})")]
    NonConvergence { iterations: usize, best_fidelity: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
