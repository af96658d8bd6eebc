use thiserror::Error;

/// Errors shared by the exact combinatorial core and the numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected vectors of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mixed field elements: {0}")]
    FieldMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("basis is singular (rank below the ambient dimension)")]
    SingularBasis,

    #[error("system size mismatch: expected {expected} slots, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("all parts are already bases; nothing to improve")]
    AllPartsAreBases,

    #[error("system is not qualified; no minimal subspace exists")]
    NotQualified,

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parameter point is on or near the discriminant: {0}")]
    NearDiscriminant(String),

    #[error("degenerate Hessian at a critical point")]
    DegenerateHessian,

    #[error("inconsistent coefficient candidates for {system}: relative spread {spread:.3e} exceeds {tolerance:.3e}")]
    InconsistentCandidates {
        system: String,
        spread: f64,
        tolerance: f64,
    },

    #[error("chain does not verify: {0}")]
    ChainInvalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("oracle error: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
