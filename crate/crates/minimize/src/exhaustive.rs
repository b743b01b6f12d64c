//! Exhaustive minimisation over all sharp admissible configurations of a
//! tiny grid.

use crate::state::EnergyState;
use crate::{MinimizeError, Result};
use branchlab_core::{GridSpec, Magnetisation, Mode};

/// Largest number of configurations [`exhaustive_minimum`] visits.
pub const ENUMERATION_LIMIT: usize = 1 << 22;

/// Optimum of an enumeration.
#[derive(Debug, Clone)]
pub struct Exhaustive {
    pub best: Magnetisation,
    pub energy: f64,
    /// Number of admissible configurations visited.
    pub count: usize,
}

/// Every `±1` pattern of `cells` cells with zero sum, as bit masks of the
/// `+1` cells.
fn balanced_masks(cells: usize) -> Vec<u64> {
    (0u64..1 << cells)
        .filter(|m| m.count_ones() as usize * 2 == cells)
        .collect()
}

/// The minimum of `σ ∫|∇'m| + ½∫|h|²` over every sharp configuration with
/// zero slice means, each evaluated from scratch. Ties keep the first
/// configuration in enumeration order (slice 0 fastest).
pub fn exhaustive_minimum(grid: &GridSpec, sigma: f64) -> Result<Exhaustive> {
    let sc = grid.slice_cells();
    if sc % 2 != 0 || sc > 24 {
        return Err(MinimizeError::InvalidConfig(format!(
            "{sc} cells per slice cannot be enumerated"
        )));
    }
    let masks = balanced_masks(sc);
    let count = (masks.len() as f64).powi(grid.n_v as i32);
    if count > ENUMERATION_LIMIT as f64 {
        return Err(MinimizeError::TooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut digits = vec![0usize; grid.n_v];
    let mut best: Option<(f64, Magnetisation)> = None;
    let mut visited = 0;
    loop {
        let values: Vec<f64> = digits
            .iter()
            .flat_map(|&d| {
                let mask = masks[d];
                (0..sc).map(move |i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            })
            .collect();
        let m = Magnetisation::new(*grid, values, Mode::Sharp)?;
        let e = EnergyState::new(&m, sigma)?.energy();
        visited += 1;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, m));
        }
        let mut s = 0;
        while s < digits.len() {
            digits[s] += 1;
            if digits[s] < masks.len() {
                break;
            }
            digits[s] = 0;
            s += 1;
        }
        if s == digits.len() {
            break;
        }
    }
    let (energy, best) = best.expect("at least one configuration");
    Ok(Exhaustive {
        best,
        energy,
        count: visited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_masks_are_binomial() {
        assert_eq!(balanced_masks(4).len(), 6);
        assert_eq!(balanced_masks(8).len(), 70);
    }
}
