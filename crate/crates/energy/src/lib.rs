//! Energies of magnetisation/stray-field pairs on the slab.
//!
//! The energy is `σ ∫|∇'m| + ½ ∫|h|²`. The interfacial part is the
//! slice-wise total variation on lateral facets. The field part integrates
//! over the field levels with the quadrature weights of the grid (see
//! [`branchlab_core::GridSpec::level_weight`]), so that box energies are
//! additive and the orthogonality and monotonicity identities hold exactly.

mod error;
mod interfacial;
mod local;
mod stray;

pub use error::EnergyError;
pub use interfacial::{interfacial_energy, interfacial_energy_in};
pub use local::{
    box_energy, box_height_average, cumulated_field, facet_sup_sq, good_width, height_average,
    local_stats, local_stats_box, monotonicity_profile, orthogonality, pair_energy, total_energy,
    EnergyBreakdown, GoodWidth, LocalStats, Orthogonality,
};
pub use stray::{
    discrete_curl_max, field_energy, level_energies, level_solver, level_sq_norm,
    minimal_level_energies, minimal_stray_energy, minimal_stray_field, minimal_stray_field_in,
};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, EnergyError>;
