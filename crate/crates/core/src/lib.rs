//! Grids, fields, admissibility and symmetry operations for the sharp-
//! interface micromagnetic slab `Q_{L,T} = [-L, L]^d × [0, T]`, `d ∈ {1, 2}`.
//!
//! The magnetisation `m` is a cell-centred scalar. The horizontal stray
//! field `h` lives on the facets of the horizontal levels that separate
//! slices, which makes the discrete constraint `∂_z m + ∇'·h = 0` a flux
//! balance per cell and level. Magnetisation beyond the bottom and top
//! faces is zero, which encodes the weak boundary condition `m ⇀ 0`.

mod admissibility;
mod error;
mod field;
mod grid;
mod subbox;
mod symmetry;

pub use admissibility::{check_admissibility, AdmissibilityReport};
pub use error::CoreError;
pub use field::{Magnetisation, Mode, StrayField};
pub use grid::{GridSpec, LateralBc, VerticalFace};
pub use subbox::{restrict, restrict_field, Anchor, CellBox, SubCuboid};
pub use symmetry::{anisotropic_rescale, mirror_vertical, reflect_even, reflect_odd};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, CoreError>;

impl From<branchlab_elliptic::EllipticError> for CoreError {
    fn from(e: branchlab_elliptic::EllipticError) -> Self {
        CoreError::InvalidGrid(e.to_string())
    }
}
