//! Horizontal elliptic solvers on a single slice of the slab.
//!
//! A slice is a uniform grid of `n0 × n1` cells (`n1 = 1` in one horizontal
//! dimension). Scalars (charges, potentials) live on cell centres; vector
//! fields live on facets, one component per axis, so that the discrete
//! divergence of a discrete gradient is the five-point Laplacian exactly.
//!
//! Each horizontal axis is either periodic or carries a homogeneous Neumann
//! (zero-flux) condition. Inversion of the Laplacian is spectral: a discrete
//! Fourier transform on periodic axes and a type-II cosine transform on
//! Neumann axes, both implemented here on top of an in-repo radix-2 FFT.

mod error;
pub mod fft;
pub mod grid;
pub mod hyperplane;
pub mod poisson;
pub mod stencil;
pub mod sum;
pub mod transform;

pub use error::EllipticError;
pub use grid::{AxisBc, SliceGrid};
pub use hyperplane::{
    solve_hyperplane_source, HyperplaneSegment, HyperplaneSolution, SnappedSegment,
};
pub use poisson::{facet_sq_norm, PoissonSolver};
pub use stencil::{divergence, divergence_parts, gradient, laplacian, FacetField};
pub use sum::{pairwise_sum, pairwise_sum_by};

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, EllipticError>;
