//! Explicit branching competitor for the sharp-interface problem.
//!
//! A unit building block refines one plaquette into `2^d` sub-plaquettes
//! over its height while keeping the slice averages of a relaxed input.
//! Rescaled copies tile the slab dyadically, finer towards the top and
//! bottom faces. For `d = 2` the block comes with explicit corrector fields
//! that carry the charge created by the rearrangement; the assembled
//! competitor uses the minimal stray field instead, which can only be
//! cheaper. Reflection and contraction turn the zero-flux competitor into a
//! periodic one.

mod assemble;
mod block;
mod corrector;
mod error;
mod manifest;
pub mod pattern;
mod periodic;

pub use assemble::{
    assemble_branching, check_resolution, choose_n, choose_n_sigma, vertical_tiling,
    zero_branching, BlockRecord, Branching, BranchingConfig, BranchingReport, VerticalTiling,
    SLICE_MEAN_TOL,
};
pub use block::{
    building_block, unit_grid, vertical_ratio, BlockGeometry, BlockInput, Orientation,
    SliceAverages,
};
pub use corrector::{block_correctors, BlockCorrectors};
pub use error::ConstructionError;
pub use manifest::{manifest_string, write_manifest};
pub use periodic::{periodic_branching, periodic_competitor};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, ConstructionError>;
