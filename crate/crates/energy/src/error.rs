use branchlab_core::CoreError;
use branchlab_elliptic::EllipticError;
use thiserror::Error;

/// Failures of energy evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error(transparent)]
    Core(#[from] CoreError),
    /// A charge level has non-zero mean, so no admissible field exists.
    #[error("level {level} is not admissible: {source}")]
    Inadmissible { level: usize, source: EllipticError },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    /// An operation needs a non-empty list.
    #[error("empty list: {0}")]
    Empty(&'static str),
    /// No width in the requested range satisfies the trace bound.
    #[error("no good width in cells {lo}..={hi}")]
    NoGoodWidth { lo: usize, hi: usize },
    /// A list of heights is not strictly increasing.
    #[error("heights must be strictly increasing")]
    NotIncreasing,
}
