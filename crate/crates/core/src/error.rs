use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode count n = {0} is degenerate; the cyclic coupling needs n >= 2")]
    DegenerateModeCount(usize),

    #[error("exponent magnitude {magnitude} exceeds the overflow guard of {bound}")]
    OverflowGuard { magnitude: f64, bound: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("imaginary residue {residue:e} in circulant reconstruction exceeds {bound:e}")]
    ImaginaryResidue { residue: f64, bound: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("power l = {l} exceeds the exact-arithmetic limit {max}")]
    PowerTooLarge { l: u32, max: u32 },

    #[error("quadrature order {order} is below the minimum {min}")]
    QuadratureOrderTooSmall { order: usize, min: usize },

    #[error("quadrature not converged: orders {order} and {next} differ by {diff:e}")]
    QuadratureNotConverged { order: usize, next: usize, diff: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("photon cutoff d = {0} is too small; need d >= 2")]
    CutoffTooSmall(usize),

    #[error("Fock space dimension {dim} exceeds the memory budget of {budget}")]
    FockBudget { dim: usize, budget: usize },

    #[error("generator is not Hermitian: deviation {0:e}")]
    NotHermitian(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("truncation leakage {leakage:e} exceeds threshold {threshold:e}; increase the cutoff")]
    Leakage { leakage: f64, threshold: f64 },
}
