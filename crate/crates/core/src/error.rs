//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A container was constructed with inconsistent dimensions.
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    /// An input's shape does not match what an operation expects.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A pooling grid cannot be formed from the given parameters.
    #[error("invalid pooling grid: {0}")]
    InvalidGrid(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Pooling input contained a negative entry.
    #[error("negative entry {value} at index {index:?}; pooling requires non-negative input")]
    NegativeEntry { index: (usize, usize), value: f64 },

    /// An index or sub-square fell outside the valid range.
    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    /// A dictionary column (or local filter) is identically zero.
    #[error("zero column at index {0}; columns must be normalizable")]
    ZeroColumn(usize),

    /// The stripe-sparsity condition of the stability theorem is violated.
    #[error(
        "sparsity condition violated at layer {layer}: lambda = {lambda} \
         must be < (1 + 1/mu)/2 = {bound} (mu = {mu})"
    )]
    SparsityCondition {
        layer: usize,
        lambda: f64,
        mu: f64,
        bound: f64,
    },

    /// Greedy pursuit could not reach the residual budget within the
    /// stripe-sparsity bound.
    #[error("pursuit infeasible{}: residual {residual} exceeds budget {budget}",
        layer.map(|l| format!(" at layer {l}")).unwrap_or_default())]
    PursuitInfeasible {
        layer: Option<usize>,
        residual: f64,
        budget: f64,
    },

    /// A restricted least-squares system was rank deficient.
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    /// A failure inside one layer of a layered model.
    #[error("layer {layer}: {source}")]
    LayerFailure {
        layer: usize,
        #[source]
        source: Box<Error>,
    },

    /// An input file could not be parsed.
    #[error("format error: {0}")]
    Format(String),

    /// A dataset-level problem (manifest, filtering, splitting).
    #[error("dataset error: {0}")]
    Dataset(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
