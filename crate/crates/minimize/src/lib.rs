//! Reference discrete minimiser of the sharp-interface energy on small
//! grids: cached spectral energy updates, Metropolis annealing over
//! mean-preserving moves, and exhaustive enumeration for oracle checks.

mod anneal;
mod error;
mod exhaustive;
mod rng;
mod state;

pub use anneal::{
    anneal, AnnealConfig, AnnealResult, MoveSet, TracePoint, TRACE_HEADER, TRACE_SAMPLES,
};
pub use error::MinimizeError;
pub use exhaustive::{exhaustive_minimum, Exhaustive, ENUMERATION_LIMIT};
pub use rng::Stream;
pub use state::{EnergyState, Move};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, MinimizeError>;
