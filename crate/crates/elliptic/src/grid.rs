//! Geometry of a horizontal slice.

use crate::{EllipticError, Result};

/// Boundary behaviour of one horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisBc {
    /// The two end facets are identified.
    Periodic,
    /// Homogeneous Neumann condition: no flux through the end facets.
    Neumann,
}

/// Uniform cell grid of one horizontal slice.
///
/// `dims` is the number of horizontal dimensions (1 or 2). For `dims = 1`
/// the second axis is degenerate: `n[1] = 1` and `dx[1] = 1`, which makes
/// the cell area equal to `dx[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceGrid {
    pub dims: usize,
    pub n: [usize; 2],
    pub dx: [f64; 2],
}

impl SliceGrid {
    /// One-dimensional slice of `n` cells of width `dx`.
    pub fn line(n: usize, dx: f64) -> Self {
        Self {
            dims: 1,
            n: [n, 1],
            dx: [dx, 1.0],
        }
    }

    /// Two-dimensional slice.
    pub fn plane(n: [usize; 2], dx: [f64; 2]) -> Self {
        Self { dims: 2, n, dx }
    }

    /// Checks positivity of sizes and spacings.
    pub fn validate(&self) -> Result<()> {
        if !(self.dims == 1 || self.dims == 2) {
            return Err(EllipticError::InvalidGrid(format!("dims = {}", self.dims)));
        }
        if self.n[0] == 0 || self.n[1] == 0 {
            return Err(EllipticError::EmptyGrid);
        }
        if self.dims == 1 && self.n[1] != 1 {
            return Err(EllipticError::InvalidGrid(
                "one-dimensional slice with n[1] != 1".into(),
            ));
        }
        for a in 0..self.dims {
            if !(self.dx[a].is_finite() && self.dx[a] > 0.0) {
                return Err(EllipticError::InvalidGrid(format!(
                    "dx[{a}] = {}",
                    self.dx[a]
                )));
            }
        }
        Ok(())
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Area (length in one dimension) of one cell.
    pub fn cell_area(&self) -> f64 {
        if self.dims == 1 {
            self.dx[0]
        } else {
            self.dx[0] * self.dx[1]
        }
    }

    /// Measure of a facet normal to `axis` (1 in one dimension).
    pub fn facet_measure(&self, axis: usize) -> f64 {
        if self.dims == 1 {
            1.0
        } else {
            self.dx[1 - axis]
        }
    }

    /// Number of facets normal to `axis`, including both end facets.
    pub fn facets(&self, axis: usize) -> usize {
        if axis >= self.dims {
            return 0;
        }
        if axis == 0 {
            (self.n[0] + 1) * self.n[1]
        } else {
            self.n[0] * (self.n[1] + 1)
        }
    }

    /// Flat index of cell `(i0, i1)`; axis 0 varies fastest.
    #[inline]
    pub fn cell(&self, i0: usize, i1: usize) -> usize {
        i0 + self.n[0] * i1
    }

    /// Flat index of the axis-0 facet with facet coordinate `f0 ∈ 0..=n0`
    /// in row `i1`.
    #[inline]
    pub fn facet0(&self, f0: usize, i1: usize) -> usize {
        f0 + (self.n[0] + 1) * i1
    }

    /// Flat index of the axis-1 facet with facet coordinate `f1 ∈ 0..=n1`
    /// in column `i0`.
    #[inline]
    pub fn facet1(&self, i0: usize, f1: usize) -> usize {
        i0 + self.n[0] * f1
    }
}
