use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum SihtError {
    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A phase stream ended before the schedule was exhausted.
    #[error("phase stream exhausted: schedule has {expected} phases, stream yielded {received}")]
    PhaseStreamExhausted { expected: usize, received: usize },

    /// Exact subset enumeration would exceed the configured cap.
    /// This is a refusal, not an approximation fallback.
    #[error("subset enumeration cap exceeded: C({n}, {r}) = {count} subsets > cap {cap}")]
    EnumerationCapExceeded {
        n: usize,
        r: usize,
        count: u128,
        cap: u128,
    },

    /// The Jacobi eigensolver failed to reduce the off-diagonal mass.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, SihtError>;
