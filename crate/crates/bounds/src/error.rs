use branchlab_construction::ConstructionError;
use branchlab_core::CoreError;
use branchlab_elliptic::EllipticError;
use branchlab_energy::EnergyError;
use thiserror::Error;

/// Failures of the bound and sweep computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    /// The pair violates the divergence constraint or has non-zero slice
    /// means.
    #[error("inadmissible pair: {0}")]
    Inadmissible(String),
    /// A parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Invalid(String),
}
