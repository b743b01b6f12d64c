//! Relaxed problem with general boundary data: the height-averaged
//! (over-relaxed) solution, the fields generating the top and bottom
//! magnetisation, and a boundary-layer construction that turns the
//! averaged solution into an admissible competitor.

mod competitor;
mod data;
mod error;
mod layer;
mod over;

pub use competitor::{relaxed_competitor, RelaxedCompetitor};
pub use data::{
    boundary_facets, check_relaxed_grid, slice_boundary_facets, BoundaryData, BoundaryFacet,
    COMPATIBILITY_TOL,
};
pub use error::RelaxedError;
pub use layer::{
    boundary_layer, conditioned_data, critical_layer_constant, layer_probe, plaquettes,
    uncovered_facets, BoundaryLayerPair, LayerReport, Plaquette, FIELD_RATIO_CONSTANT,
    LAYER_CONSTANT,
};
pub use over::{
    generating_fields, interpolated_magnetisation, minimal_relaxed_field, relaxed_charge,
    relaxed_residual, solve_over_relaxed, OverRelaxed,
};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, RelaxedError>;
