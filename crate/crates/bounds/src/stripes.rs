//! Unbranched baseline: stripes of `±1` along axis 0, constant in height.
//!
//! Such a pattern carries charge only on the two horizontal faces, where
//! the boundary sheets are smeared over one cell height.

use crate::{BoundsError, Result};
use branchlab_core::{GridSpec, Magnetisation, Mode};
use branchlab_energy::{total_energy, EnergyBreakdown};
use rayon::prelude::*;

/// Energy of one stripe width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripeCandidate {
    /// Stripe width in cells.
    pub cells: usize,
    /// Stripe width.
    pub width: f64,
    pub energy: EnergyBreakdown,
}

/// Best stripe width and the full table of candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct StripeBaseline {
    pub best: StripeCandidate,
    /// Candidates by increasing width.
    pub table: Vec<StripeCandidate>,
}

/// The stripe pattern with `cells`-wide stripes, starting with `+1`.
pub fn stripe_pattern(grid: &GridSpec, cells: usize) -> Result<Magnetisation> {
    if cells == 0 || grid.n[0] % cells != 0 || (grid.n[0] / cells) % 2 != 0 {
        return Err(BoundsError::Invalid(format!(
            "stripe width {cells} must split {} cells into an even number of stripes",
            grid.n[0]
        )));
    }
    Ok(Magnetisation::from_fn(*grid, Mode::Sharp, |i0, _, _| {
        if (i0 / cells) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })?)
}

/// Sweeps every stripe width that splits axis 0 into an even number of
/// stripes (so slice means vanish) and returns the cheapest.
pub fn stripe_baseline(grid: &GridSpec, sigma: f64) -> Result<StripeBaseline> {
    let widths: Vec<usize> = (1..=grid.n[0] / 2)
        .filter(|w| grid.n[0] % w == 0 && (grid.n[0] / w) % 2 == 0)
        .collect();
    let table = widths
        .par_iter()
        .map(|&w| {
            let m = stripe_pattern(grid, w)?;
            Ok(StripeCandidate {
                cells: w,
                width: w as f64 * grid.dx(0),
                energy: total_energy(&m, sigma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = *table
        .iter()
        .min_by(|a, b| a.energy.total.total_cmp(&b.energy.total))
        .ok_or_else(|| BoundsError::Invalid("no admissible stripe width".into()))?;
    Ok(StripeBaseline { best, table })
}
