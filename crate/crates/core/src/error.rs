use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("series did not reach its tail bound within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("series term overflowed at k = {k}")]
    Overflow { k: usize },

    #[error("alternating series loses precision: largest term {largest_term:e}")]
    PrecisionLoss { largest_term: f64 },

    #[error("quadrature failed: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureFailure { estimate: f64, tol: f64 },

    #[error("operator needs ceiling order {expected}, got delta = {delta}")]
    OrderMismatch { expected: u32, delta: f64 },

    #[error("operation requires a uniform time grid")]
    NonUniformGrid,

    #[error("tridiagonal system is singular at row {row}")]
    SingularSystem { row: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible initial/boundary data at x = {x}: phi0 - psi = {mismatch:e}")]
    Incompatible { x: f64, mismatch: f64 },

    #[error("operator is not uniformly elliptic: min p = {p_min}")]
    NotElliptic { p_min: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
