//! Competitor for the relaxed problem: the averaged pair corrected in the
//! boundary layer.

use crate::layer::{boundary_layer, BoundaryLayerPair};
use crate::over::{interpolated_magnetisation, relaxed_residual, solve_over_relaxed, OverRelaxed};
use crate::{BoundaryData, Result};
use branchlab_core::{Magnetisation, Mode, StrayField};
use branchlab_elliptic::pairwise_sum;

/// The pair `(m₀ + m_r, h̄ + h_r)` and its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedCompetitor {
    /// Relaxed magnetisation, values in `[-1, 1]`.
    pub m: Magnetisation,
    /// Stray field with the prescribed lateral flux.
    pub h: StrayField,
    /// The averaged solution it starts from.
    pub over: OverRelaxed,
    /// The layer correction.
    pub layer: BoundaryLayerPair,
    /// Largest violation of the relaxed constraint.
    pub residual: f64,
    /// `T‖∂_z m‖²_{L²L^∞}` over the whole box.
    pub slope_sq: f64,
}

/// Builds the competitor with a layer of `r_cells` cells and layer
/// constant `c_layer`.
pub fn relaxed_competitor(
    bd: &BoundaryData,
    r_cells: usize,
    c_layer: f64,
) -> Result<RelaxedCompetitor> {
    let grid = *bd.grid();
    let over = solve_over_relaxed(bd)?;
    let layer = boundary_layer(bd, r_cells, c_layer)?;
    let m0 = interpolated_magnetisation(bd)?;
    // m₀ + λ(m̄ - m₀) is a convex combination; clamping only removes
    // round-off beyond ±1.
    let values: Vec<f64> = m0
        .values()
        .iter()
        .zip(layer.m_r.values())
        .map(|(a, b)| (a + b).clamp(-1.0, 1.0))
        .collect();
    let m = Magnetisation::new(grid, values, Mode::Relaxed)?;
    let h = over.stray_field(&grid)?.add(&layer.h_r)?;
    let residual = relaxed_residual(&m, &h, bd)?;
    let mut slope = Vec::with_capacity(grid.levels());
    for k in 0..grid.levels() {
        let upper = if k < grid.n_v { m.slice(k) } else { bd.m_top() };
        let lower = if k > 0 { m.slice(k - 1) } else { bd.m_bottom() };
        let sup = upper
            .iter()
            .zip(lower)
            .map(|(u, l)| ((u - l) / grid.dz()).abs())
            .fold(0.0, f64::max);
        slope.push(grid.dz() * sup * sup);
    }
    let slope_sq = grid.height * pairwise_sum(&slope);
    Ok(RelaxedCompetitor {
        m,
        h,
        over,
        layer,
        residual,
        slope_sq,
    })
}
