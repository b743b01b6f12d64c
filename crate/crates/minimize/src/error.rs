use branchlab_core::CoreError;
use branchlab_elliptic::EllipticError;
use branchlab_energy::EnergyError;
use thiserror::Error;

/// Failures of the discrete minimiser.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimizeError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    /// The configuration or the move leaves the admissible class.
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    /// A cell index beyond the grid.
    #[error("cell {cell} out of range (grid has {cells} cells)")]
    CellOutOfRange { cell: usize, cells: usize },
    /// Invalid annealing parameters.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Exhaustive enumeration would visit too many configurations.
    #[error("{count} configurations exceed the enumeration limit {limit}")]
    TooLarge { count: f64, limit: usize },
}
