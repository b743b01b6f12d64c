use branchlab_core::CoreError;
use branchlab_elliptic::EllipticError;
use branchlab_energy::EnergyError;
use thiserror::Error;

/// Failures of the relaxed constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelaxedError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    /// Lateral flux and top/bottom data violate the compatibility balance.
    #[error("incompatible boundary data: flux {flux} against magnetisation balance {balance}")]
    Incompatible { flux: f64, balance: f64 },
    /// Boundary data of the wrong shape or out of range.
    #[error("invalid boundary data: {0}")]
    InvalidData(String),
    /// The layer is narrower than the layer-size condition requires.
    #[error("layer too narrow: r/L = {got} but the condition requires {required}")]
    RTooSmall { required: f64, got: f64 },
    /// The interpolation weight left `[0, ½]`.
    #[error(
        "interpolation weight {value} outside [0, 1/2] in plaquette {plaquette}, slice {slice}"
    )]
    LambdaOutOfRange {
        plaquette: usize,
        slice: usize,
        value: f64,
    },
    /// The layer cannot be tiled by square plaquettes of the requested size.
    #[error("degenerate plaquette tiling: {0}")]
    DegenerateTiling(String),
}
