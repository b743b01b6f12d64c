//! The interpolation inequality between `BV` and `Ḣ^{-1}` on one slice:
//! `‖u‖_{4/3} ≤ C ‖∇'u‖₁^{1/2} ‖|∇'|⁻¹u‖₂^{1/2}` for zero-mean `u`.

use crate::Result;
use branchlab_core::{GridSpec, Magnetisation, Mode, VerticalFace};
use branchlab_elliptic::pairwise_sum;
use branchlab_energy::{interfacial_energy, level_solver};

/// One horizontal slice as a grid of its own (unit height, one slice).
pub fn slice_grid_of(grid: &GridSpec) -> Result<GridSpec> {
    Ok(GridSpec::with_parts(
        grid.d,
        grid.n,
        1,
        grid.half,
        1.0,
        grid.bc,
        VerticalFace::Closed,
        VerticalFace::Closed,
    )?)
}

/// The three norms of one slice field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceNorms {
    /// `‖u‖_{4/3}^{4/3} = ∫|u|^{4/3}`.
    pub l43_pow: f64,
    /// `‖∇'u‖₁`, the total variation (wrap-around facets count on periodic
    /// axes).
    pub variation: f64,
    /// `‖|∇'|⁻¹u‖₂²`.
    pub inv_grad_sq: f64,
}

impl SliceNorms {
    /// `‖u‖_{4/3} / (‖∇'u‖₁^{1/2} ‖|∇'|⁻¹u‖₂^{1/2})`, defined as 0 for
    /// `u ≡ 0`.
    pub fn ratio(&self) -> f64 {
        if self.l43_pow == 0.0 {
            return 0.0;
        }
        self.l43_pow.powf(0.75) / (self.variation.sqrt() * self.inv_grad_sq.powf(0.25))
    }
}

/// Norms of a zero-mean slice field `u` on the horizontal geometry of
/// `grid` (periodic or zero-flux sides).
pub fn slice_norms(grid: &GridSpec, u: &[f64]) -> Result<SliceNorms> {
    let sg = slice_grid_of(grid)?;
    let area = sg.cell_area();
    let l43_pow = area
        * pairwise_sum(
            &u.iter()
                .map(|v| v.abs().powf(4.0 / 3.0))
                .collect::<Vec<_>>(),
        );
    let m = Magnetisation::new(sg, u.to_vec(), Mode::Relaxed)?;
    let variation = interfacial_energy(&m);
    let inv_grad_sq = level_solver(&sg)?.inv_grad_sq_norm(u)?;
    Ok(SliceNorms {
        l43_pow,
        variation,
        inv_grad_sq,
    })
}

/// `‖u‖_{4/3} / (‖∇'u‖₁^{1/2} ‖|∇'|⁻¹u‖₂^{1/2})` of a zero-mean slice
/// field; 0 for `u ≡ 0`.
pub fn interpolation_ratio(grid: &GridSpec, u: &[f64]) -> Result<f64> {
    Ok(slice_norms(grid, u)?.ratio())
}
