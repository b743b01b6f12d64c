use branchlab_core::CoreError;
use branchlab_elliptic::EllipticError;
use branchlab_energy::EnergyError;
use thiserror::Error;

/// Failures of the branching construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    /// A block average left `[-1, 1]`.
    #[error("average {value} outside [-1, 1]")]
    AverageOutOfRange { value: f64 },
    /// The grid cannot represent the requested refinement.
    #[error("unresolvable construction: {0}")]
    Unresolvable(String),
    /// Only `d = 2` blocks have corrector fields.
    #[error("corrector fields need d = 2, got d = {d}")]
    Dimension { d: usize },
    /// The relaxed input is not admissible for the box.
    #[error("inadmissible relaxed input: {0}")]
    Inadmissible(String),
}
