//! Facet-flux stencils.
//!
//! The gradient maps cell values to facet values and the divergence maps
//! facet values back to cells. Their composition is the standard five-point
//! (three-point in one dimension) Laplacian, and summing the divergence over
//! all cells telescopes to the net flux through the boundary facets, so the
//! discrete Gauss theorem holds exactly.

use crate::{AxisBc, EllipticError, Result, SliceGrid};

/// A horizontal vector field stored on facets.
///
/// `comps[a]` holds the axis-`a` component on the facets normal to axis `a`,
/// indexed by [`SliceGrid::facet0`] / [`SliceGrid::facet1`]. In one
/// dimension `comps[1]` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetField {
    pub comps: [Vec<f64>; 2],
}

impl FacetField {
    /// The zero field on `grid`.
    pub fn zeros(grid: &SliceGrid) -> Self {
        Self {
            comps: [vec![0.0; grid.facets(0)], vec![0.0; grid.facets(1)]],
        }
    }

    /// Largest absolute facet value.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Scales every component by `s`.
    pub fn scale(&mut self, s: f64) {
        for c in self.comps.iter_mut() {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
    }

    /// Adds `other` component-wise.
    pub fn add_assign(&mut self, other: &FacetField) {
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += w;
            }
        }
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(EllipticError::LengthMismatch { expected, got })
    }
}

/// Discrete gradient `∇u` on facets.
///
/// Interior facets carry the difference quotient of the two adjacent cells.
/// On a periodic axis both end facets carry the wrap-around difference; on a
/// Neumann axis the end facets are zero.
pub fn gradient(grid: &SliceGrid, bc: [AxisBc; 2], u: &[f64]) -> Result<FacetField> {
    grid.validate()?;
    check_len(grid.cells(), u.len())?;
    let [n0, n1] = grid.n;
    let mut out = FacetField::zeros(grid);
    for i1 in 0..n1 {
        for f0 in 1..n0 {
            out.comps[0][grid.facet0(f0, i1)] =
                (u[grid.cell(f0, i1)] - u[grid.cell(f0 - 1, i1)]) / grid.dx[0];
        }
        if bc[0] == AxisBc::Periodic {
            let wrap = (u[grid.cell(0, i1)] - u[grid.cell(n0 - 1, i1)]) / grid.dx[0];
            out.comps[0][grid.facet0(0, i1)] = wrap;
            out.comps[0][grid.facet0(n0, i1)] = wrap;
        }
    }
    if grid.dims == 2 {
        for i0 in 0..n0 {
            for f1 in 1..n1 {
                out.comps[1][grid.facet1(i0, f1)] =
                    (u[grid.cell(i0, f1)] - u[grid.cell(i0, f1 - 1)]) / grid.dx[1];
            }
            if bc[1] == AxisBc::Periodic {
                let wrap = (u[grid.cell(i0, 0)] - u[grid.cell(i0, n1 - 1)]) / grid.dx[1];
                out.comps[1][grid.facet1(i0, 0)] = wrap;
                out.comps[1][grid.facet1(i0, n1)] = wrap;
            }
        }
    }
    Ok(out)
}

/// Discrete divergence of a facet field, one value per cell.
pub fn divergence(grid: &SliceGrid, field: &FacetField) -> Result<Vec<f64>> {
    divergence_parts(grid, &field.comps[0], &field.comps[1])
}

/// Divergence from borrowed component arrays.
pub fn divergence_parts(grid: &SliceGrid, c0: &[f64], c1: &[f64]) -> Result<Vec<f64>> {
    grid.validate()?;
    check_len(grid.facets(0), c0.len())?;
    check_len(grid.facets(1), c1.len())?;
    let [n0, n1] = grid.n;
    let mut div = vec![0.0; grid.cells()];
    for i1 in 0..n1 {
        for i0 in 0..n0 {
            let mut v = (c0[grid.facet0(i0 + 1, i1)] - c0[grid.facet0(i0, i1)]) / grid.dx[0];
            if grid.dims == 2 {
                v += (c1[grid.facet1(i0, i1 + 1)] - c1[grid.facet1(i0, i1)]) / grid.dx[1];
            }
            div[grid.cell(i0, i1)] = v;
        }
    }
    Ok(div)
}

/// Discrete Laplacian `div(grad u)`.
pub fn laplacian(grid: &SliceGrid, bc: [AxisBc; 2], u: &[f64]) -> Result<Vec<f64>> {
    divergence(grid, &gradient(grid, bc, u)?)
}
