//! Discretisation of the slab `[-L, L]^d × [0, T]`.
//!
//! Cells are indexed by `(i0, i1, k)` with `k` the slice (bottom slice 0).
//! The magnetisation lives on cells. The stray field lives on the `n_v + 1`
//! horizontal levels that separate consecutive slices (level `k` is the
//! lower face of slice `k`), and within a level on the lateral facets, one
//! component per axis. Level `k` carries the vertical charge
//! `-(m_k - m_{k-1}) / Δz`.

use crate::{CoreError, Result};
use branchlab_elliptic::{AxisBc, SliceGrid};

/// Lateral boundary behaviour of one horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LateralBc {
    /// Opposite faces are identified.
    Periodic,
    /// The normal stray-field component vanishes on both faces.
    ZeroFlux,
    /// Arbitrary normal flux: restricted patches and odd reflections.
    Free,
}

impl LateralBc {
    /// Parses `periodic`, `zero-flux` (or `zeroflux`) and `free`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" => Some(Self::Periodic),
            "zero-flux" | "zeroflux" | "zero_flux" => Some(Self::ZeroFlux),
            "free" => Some(Self::Free),
            _ => None,
        }
    }

    /// Canonical name, inverse of [`LateralBc::parse`].
    pub fn name(self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::ZeroFlux => "zero-flux",
            Self::Free => "free",
        }
    }

    /// The slice-solver condition, if the axis has one.
    pub fn solver_bc(self) -> Option<AxisBc> {
        match self {
            Self::Periodic => Some(AxisBc::Periodic),
            Self::ZeroFlux => Some(AxisBc::Neumann),
            Self::Free => None,
        }
    }
}

/// Nature of a horizontal face of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerticalFace {
    /// A face of the physical slab: the magnetisation vanishes beyond it.
    Closed,
    /// A cut through a larger slab: the level on this face is shared with
    /// the neighbouring box and carries half weight.
    Cut,
}

/// Uniform grid on a box.
///
/// For `d = 1` the second axis is inert: `n[1] = 1`, `half[1] = 0.5` (unit
/// cell width) and `bc[1] = bc[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub d: usize,
    pub n: [usize; 2],
    pub n_v: usize,
    pub half: [f64; 2],
    pub height: f64,
    pub bc: [LateralBc; 2],
    pub bottom: VerticalFace,
    pub top: VerticalFace,
}

impl GridSpec {
    /// Grid of the full slab with `n_h` cells per horizontal axis (a power
    /// of two, at least 2), `n_v` slices, half-width `l` and height `t`.
    pub fn new(d: usize, n_h: usize, n_v: usize, l: f64, t: f64, bc: LateralBc) -> Result<Self> {
        if n_h < 2 || !n_h.is_power_of_two() {
            return Err(CoreError::InvalidGrid(format!(
                "n_h = {n_h} must be a power of two ≥ 2"
            )));
        }
        if bc == LateralBc::Free {
            return Err(CoreError::InvalidGrid(
                "the full slab needs periodic or zero-flux sides".into(),
            ));
        }
        Self::with_parts(
            d,
            [n_h, n_h],
            n_v,
            [l, l],
            t,
            [bc, bc],
            VerticalFace::Closed,
            VerticalFace::Closed,
        )
    }

    /// General grid; used for derived boxes (restrictions, reflections,
    /// unit blocks). Cell counts need not be powers of two.
    #[allow(clippy::too_many_arguments)]
    pub fn with_parts(
        d: usize,
        n: [usize; 2],
        n_v: usize,
        half: [f64; 2],
        height: f64,
        bc: [LateralBc; 2],
        bottom: VerticalFace,
        top: VerticalFace,
    ) -> Result<Self> {
        let g = if d == 1 {
            Self {
                d,
                n: [n[0], 1],
                n_v,
                half: [half[0], 0.5],
                height,
                bc: [bc[0], bc[0]],
                bottom,
                top,
            }
        } else {
            Self {
                d,
                n,
                n_v,
                half,
                height,
                bc,
                bottom,
                top,
            }
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks all invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.d == 1 || self.d == 2) {
            return Err(CoreError::InvalidGrid(format!(
                "d = {} (only 1 and 2 supported)",
                self.d
            )));
        }
        for a in 0..self.d {
            if self.n[a] == 0 {
                return Err(CoreError::InvalidGrid(format!("n[{a}] = 0")));
            }
            if !(self.half[a].is_finite() && self.half[a] > 0.0) {
                return Err(CoreError::InvalidGrid(format!(
                    "half-width {} not positive",
                    self.half[a]
                )));
            }
        }
        if self.d == 1 && (self.n[1] != 1 || self.half[1] != 0.5) {
            return Err(CoreError::InvalidGrid(
                "inert second axis must have one unit cell".into(),
            ));
        }
        if self.n_v == 0 {
            return Err(CoreError::InvalidGrid("n_v = 0".into()));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "height {} not positive",
                self.height
            )));
        }
        Ok(())
    }

    /// Cell width along a horizontal axis.
    #[inline]
    pub fn dx(&self, axis: usize) -> f64 {
        2.0 * self.half[axis] / self.n[axis] as f64
    }

    /// Slice thickness.
    #[inline]
    pub fn dz(&self) -> f64 {
        self.height / self.n_v as f64
    }

    /// Cells per slice.
    #[inline]
    pub fn slice_cells(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Total number of cells.
    #[inline]
    pub fn cells(&self) -> usize {
        self.slice_cells() * self.n_v
    }

    /// Number of field levels (`n_v + 1`).
    #[inline]
    pub fn levels(&self) -> usize {
        self.n_v + 1
    }

    /// Flat cell index; axis 0 fastest, slices outermost.
    #[inline]
    pub fn idx(&self, i0: usize, i1: usize, k: usize) -> usize {
        i0 + self.n[0] * (i1 + self.n[1] * k)
    }

    /// Horizontal cell area (width for `d = 1`).
    pub fn cell_area(&self) -> f64 {
        self.slice_grid().cell_area()
    }

    /// Horizontal cross-section `(2L)^d`.
    pub fn cross_section(&self) -> f64 {
        (0..self.d).map(|a| 2.0 * self.half[a]).product()
    }

    /// Volume `(2L)^d T`.
    pub fn volume(&self) -> f64 {
        self.cross_section() * self.height
    }

    /// The slice geometry used by the horizontal solvers.
    pub fn slice_grid(&self) -> SliceGrid {
        if self.d == 1 {
            SliceGrid::line(self.n[0], self.dx(0))
        } else {
            SliceGrid::plane(self.n, [self.dx(0), self.dx(1)])
        }
    }

    /// Solver conditions, or an error if an axis is free.
    pub fn solver_bc(&self) -> Result<[AxisBc; 2]> {
        match (self.bc[0].solver_bc(), self.bc[1].solver_bc()) {
            (Some(a), Some(b)) => Ok([a, b]),
            _ => Err(CoreError::BoundaryCondition(
                "a free lateral axis has no unique minimal stray field".into(),
            )),
        }
    }

    /// Facets normal to `axis` per level.
    pub fn facets(&self, axis: usize) -> usize {
        self.slice_grid().facets(axis)
    }

    /// Quadrature weight of field level `k`: 1 inside and on closed faces,
    /// ½ on cut faces.
    pub fn level_weight(&self, k: usize) -> f64 {
        let face = if k == 0 {
            Some(self.bottom)
        } else if k == self.n_v {
            Some(self.top)
        } else {
            None
        };
        match face {
            Some(VerticalFace::Cut) => 0.5,
            _ => 1.0,
        }
    }

    /// `Σ_k w_k Δz`, the height over which the field levels integrate.
    pub fn field_height(&self) -> f64 {
        (0..self.levels())
            .map(|k| self.level_weight(k))
            .sum::<f64>()
            * self.dz()
    }

    /// Weight of a lateral facet coordinate `f ∈ 0..=n[axis]`: ½ on the two
    /// end facets, 1 inside.
    #[inline]
    pub fn facet_weight(&self, axis: usize, f: usize) -> f64 {
        if f == 0 || f == self.n[axis] {
            0.5
        } else {
            1.0
        }
    }

    /// Centre coordinate of cell `i` along `axis`.
    pub fn centre(&self, axis: usize, i: usize) -> f64 {
        -self.half[axis] + (i as f64 + 0.5) * self.dx(axis)
    }

    /// Height of the centre of slice `k`.
    pub fn slice_centre(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dz()
    }

    /// Fails unless `other` has the same geometry.
    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(CoreError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Fails unless `axis` is a horizontal axis of this grid.
    pub fn ensure_axis(&self, axis: usize) -> Result<()> {
        if axis < self.d {
            Ok(())
        } else {
            Err(CoreError::AxisOutOfRange { axis, dims: self.d })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_slab_has_unit_level_weights() {
        let g = GridSpec::new(2, 8, 5, 2.0, 3.0, LateralBc::ZeroFlux).unwrap();
        assert!((0..=5).all(|k| g.level_weight(k) == 1.0));
        assert!((g.field_height() - 6.0 * 0.6).abs() < 1e-15);
        assert_eq!(g.dx(1), 0.5);
        assert_eq!(g.idx(1, 2, 3), 1 + 8 * (2 + 8 * 3));
    }

    #[test]
    fn constructor_rejects_bad_sizes() {
        assert!(GridSpec::new(2, 6, 4, 1.0, 1.0, LateralBc::Periodic).is_err());
        assert!(GridSpec::new(3, 8, 4, 1.0, 1.0, LateralBc::Periodic).is_err());
        assert!(GridSpec::new(1, 8, 0, 1.0, 1.0, LateralBc::Periodic).is_err());
        assert!(GridSpec::new(1, 8, 4, -1.0, 1.0, LateralBc::Periodic).is_err());
        assert!(GridSpec::new(1, 8, 4, 1.0, 1.0, LateralBc::Free).is_err());
    }

    #[test]
    fn one_dimensional_grid_has_inert_axis() {
        let g = GridSpec::new(1, 16, 4, 2.0, 1.0, LateralBc::Periodic).unwrap();
        assert_eq!(g.n, [16, 1]);
        assert_eq!(g.cell_area(), 0.25);
        assert_eq!(g.cross_section(), 4.0);
        assert_eq!(g.facets(1), 0);
    }

    #[test]
    fn bc_names_round_trip() {
        for bc in [LateralBc::Periodic, LateralBc::ZeroFlux, LateralBc::Free] {
            assert_eq!(LateralBc::parse(bc.name()), Some(bc));
        }
    }
}
