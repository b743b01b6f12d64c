//! Neumann problem on the unit cube with a charge layer on a hyperplane
//! segment.
//!
//! The right-hand side is `f` minus its total mass spread uniformly over the
//! segment `H = {a1} × (a2, b2)`. The surface measure on `H` is realised as
//! a one-cell-wide layer next to the facet column at `a1` (on the `+` side,
//! or on the `-` side when `a1` is the upper face), so the right-hand side
//! has zero mean exactly and the Neumann problem is solvable.

use crate::poisson::PoissonSolver;
use crate::sum::pairwise_sum;
use crate::{AxisBc, EllipticError, Result, SliceGrid};

/// A hyperplane segment in unit-cube coordinates.
///
/// `a1` is the position of the plane normal to axis 0. In two dimensions
/// `(lo, hi)` is its extent along axis 1; in one dimension the segment is
/// the point `a1` and `(lo, hi)` is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperplaneSegment {
    pub a1: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Facet-snapped form of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnappedSegment {
    /// Facet coordinate along axis 0, in `0..=n0`.
    pub facet: usize,
    /// Cell range along axis 1.
    pub cells: (usize, usize),
}

impl HyperplaneSegment {
    /// Snaps to the nearest facet column and cell range on `grid`.
    pub fn snap(&self, grid: &SliceGrid) -> Result<SnappedSegment> {
        let in_unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !in_unit(self.a1) {
            return Err(EllipticError::HyperplaneOutOfRange(format!(
                "a1 = {}",
                self.a1
            )));
        }
        let facet = (self.a1 * grid.n[0] as f64).round() as usize;
        let cells = if grid.dims == 1 {
            (0, 1)
        } else {
            if !(in_unit(self.lo) && in_unit(self.hi)) {
                return Err(EllipticError::HyperplaneOutOfRange(format!(
                    "extent ({}, {})",
                    self.lo, self.hi
                )));
            }
            let lo = (self.lo * grid.n[1] as f64).round() as usize;
            let hi = (self.hi * grid.n[1] as f64).round() as usize;
            (lo, hi)
        };
        if cells.1 <= cells.0 {
            return Err(EllipticError::EmptyHyperplane);
        }
        Ok(SnappedSegment { facet, cells })
    }
}

/// Result of a hyperplane-source solve.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneSolution {
    /// Zero-mean potential.
    pub u: Vec<f64>,
    /// `∫|∇u|²`.
    pub grad_sq: f64,
    /// `∫f²`.
    pub source_sq: f64,
    /// Measure of the snapped segment (1 in one dimension).
    pub measure: f64,
    /// `∫|∇u|² / ((1/|H|) ∫f²)`, or 0 when `f ≡ 0`.
    pub ratio: f64,
    /// The snapped segment.
    pub segment: SnappedSegment,
}

/// Solves the hyperplane-source Neumann problem on the unit cube.
///
/// `n` is the number of cells per axis (`n[1] = 1` in one dimension) and
/// `f` the cell values of the source.
pub fn solve_hyperplane_source(
    dims: usize,
    n: [usize; 2],
    f: &[f64],
    segment: &HyperplaneSegment,
) -> Result<HyperplaneSolution> {
    let grid = if dims == 1 {
        SliceGrid::line(n[0], 1.0 / n[0].max(1) as f64)
    } else {
        SliceGrid::plane(n, [1.0 / n[0].max(1) as f64, 1.0 / n[1].max(1) as f64])
    };
    grid.validate()?;
    if f.len() != grid.cells() {
        return Err(EllipticError::LengthMismatch {
            expected: grid.cells(),
            got: f.len(),
        });
    }
    let seg = segment.snap(&grid)?;
    let area = grid.cell_area();
    let measure = if dims == 1 {
        1.0
    } else {
        (seg.cells.1 - seg.cells.0) as f64 * grid.dx[1]
    };
    let mass = area * pairwise_sum(f);
    let layer = mass / measure / grid.dx[0];
    let column = if seg.facet < grid.n[0] {
        seg.facet
    } else {
        grid.n[0] - 1
    };
    let mut rhs = f.to_vec();
    for i1 in seg.cells.0..seg.cells.1 {
        rhs[grid.cell(column, i1)] -= layer;
    }
    let solver = PoissonSolver::new(grid, [AxisBc::Neumann; 2])?;
    let u = solver.solve_projected(&rhs);
    let grad_sq = solver.facet_sq_norm(&solver.gradient(&u)?);
    let source_sq = area * pairwise_sum(&f.iter().map(|v| v * v).collect::<Vec<_>>());
    let ratio = if source_sq > 0.0 {
        grad_sq / (source_sq / measure)
    } else {
        0.0
    };
    Ok(HyperplaneSolution {
        u,
        grad_sq,
        source_sq,
        measure,
        ratio,
        segment: seg,
    })
}
