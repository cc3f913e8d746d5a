use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Index fields are 0-based, matching the library API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular: pivot column {column} has norm {norm:e}")]
    SingularInput { column: usize, norm: f64 },

    #[error("matrix is not symmetric (max asymmetry {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not orthogonal (max defect {defect:e})")]
    NotOrthogonal { defect: f64 },

    #[error("degenerate spectrum: gap between eigenvalues {index} and {} is {gap:e}", index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index set must be a proper nonempty subset of 0..{n}")]
    EmptyOrFullSet { n: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("rank deficiency in block {block}: found {found} independent columns, expected {expected}")]
    RankDeficiency {
        block: usize,
        found: usize,
        expected: usize,
    },

    #[error("rank decision in block {block} is indeterminate (column norm ratio {ratio:e})")]
    IndeterminateRank { block: usize, ratio: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("dimension {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("vector must have strictly positive entries and unit norm")]
    NotPositiveVector,

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("target is not interior to the spectral polytope (slack {slack:e}, required {required:e})")]
    NotInterior { slack: f64, required: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
