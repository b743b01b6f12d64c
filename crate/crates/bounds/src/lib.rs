//! Lower bounds, baselines and measurements around the branching
//! competitor.
//!
//! The lower-bound chain evaluates the slice-wise interpolation between
//! total variation and the `Ḣ^{-1}` norm that underlies the `L^d T^{1/3}`
//! lower bound. The stripe baseline is the best height-independent
//! pattern. Sweeps record the competitor's energy density across slab
//! heights, and probes record local quantities on shrinking boxes at the
//! top or bottom face.

mod chain;
mod error;
mod interpolation;
mod probe;
mod stripes;
mod sweep;

pub use chain::{chain_of, lower_bound_chain, ChainBound, CHAIN_ADMISSIBILITY_TOL, YOUNG_CONSTANT};
pub use error::BoundsError;
pub use interpolation::{interpolation_ratio, slice_grid_of, slice_norms, SliceNorms};
pub use probe::{
    local_probe, local_probe_minimal, ProbeConfig, ProbeReport, ProbeRung, PROBE_HEADER,
};
pub use stripes::{stripe_baseline, stripe_pattern, StripeBaseline, StripeCandidate};
pub use sweep::{
    competitor_row, fit_slope, scaling_sweep, SweepConfig, SweepResult, SweepRow, SWEEP_HEADER,
};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, BoundsError>;
