use thiserror::Error;

/// Errors produced by the evaluation library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus mismatch: {0}")]
    ModulusMismatch(String),

    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: String, modulus: String },

    #[error("invalid input: {0}")]
    Usage(String),

    #[error("precondition violated: {0}")]
    Contract(String),

    /// Every common difference in `[ceil(0.8 D), D]` exhausted its candidate cap.
    #[error(
        "no arithmetic progression with enough primes for D = {d}, log2 M <= {m_bits}; \
         try a larger degree bound D"
    )]
    NoProgressionFound { d: u64, m_bits: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
