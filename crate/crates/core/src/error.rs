use thiserror::Error;

/// Failures of grid and field operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// Grid parameters violate an invariant.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// Two operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A value array does not match the grid.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// A magnetisation value is outside the range allowed by its mode.
    #[error("value {value} at cell {index} not allowed in {mode} mode")]
    ValueOutOfRange {
        index: usize,
        value: f64,
        mode: &'static str,
    },
    /// A horizontal axis index is out of range.
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },
    /// The lateral boundary condition does not permit the operation.
    #[error("boundary condition: {0}")]
    BoundaryCondition(String),
    /// A sub-box is not aligned with cell boundaries.
    #[error("misaligned sub-box: {0}")]
    Misaligned(String),
    /// A sub-box leaves the domain.
    #[error("sub-box outside the domain: {0}")]
    OutOfDomain(String),
    /// Rescaling factor is not a positive finite number.
    #[error("invalid scaling factor {0}")]
    InvalidScale(f64),
}
