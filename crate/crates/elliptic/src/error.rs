use thiserror::Error;

/// Failures of the slice solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    /// The right-hand side does not have zero mean, so the Neumann or
    /// periodic problem has no solution.
    #[error("incompatible right-hand side: mean {mean:e} exceeds tolerance {tolerance:e}")]
    Incompatible { mean: f64, tolerance: f64 },
    /// A grid with no cells was supplied.
    #[error("grid has no cells")]
    EmptyGrid,
    /// An input array does not match the grid.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// The hyperplane segment covers no facets.
    #[error("hyperplane segment is empty")]
    EmptyHyperplane,
    /// The hyperplane segment lies outside the grid.
    #[error("hyperplane segment out of range: {0}")]
    HyperplaneOutOfRange(String),
    /// Invalid grid geometry.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
