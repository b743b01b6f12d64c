//! The unit building block: a `±1` magnetisation on `[0, 1]^{d+1}` with
//! one interface per plaquette row, refined from one plaquette at the top
//! face to `2^d` sub-plaquettes at the bottom face, with the slice averages
//! of the relaxed input.

use crate::pattern::{fill_slice, tile_averages, Tile, TileAverages};
use crate::{ConstructionError, Result};
use branchlab_core::{GridSpec, LateralBc, Magnetisation, Mode, VerticalFace};
use serde::Serialize;

/// Ratio `2^{3/2}` between consecutive vertical scales.
pub fn vertical_ratio() -> f64 {
    2.0_f64.powf(1.5)
}

/// Grid of the unit block with `cells` cells per horizontal axis and
/// `slices` slices. Cell `(i0, i1, s)` covers
/// `[i0/c, (i0+1)/c] × [i1/c, (i1+1)/c] × [s/n, (s+1)/n]` in block
/// coordinates.
pub fn unit_grid(d: usize, cells: usize, slices: usize) -> Result<GridSpec> {
    if cells < 2 || cells % 2 != 0 {
        return Err(ConstructionError::Unresolvable(format!(
            "{cells} cells per block side (need an even count ≥ 2)"
        )));
    }
    if slices < 2 {
        return Err(ConstructionError::Unresolvable(format!(
            "{slices} slices per block (need at least 2)"
        )));
    }
    Ok(GridSpec::with_parts(
        d,
        [cells, cells],
        slices,
        [0.5, 0.5],
        1.0,
        [LateralBc::ZeroFlux; 2],
        VerticalFace::Closed,
        VerticalFace::Closed,
    )?)
}

/// Plaquette and sub-plaquette averages of the relaxed input in one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceAverages {
    /// Block height of the slice centre.
    pub y: f64,
    /// Averages over the whole plaquette and over the sub-plaquettes.
    pub averages: TileAverages,
}

/// Relaxed input of one building block, sampled on a unit grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInput {
    relaxed: Magnetisation,
    profile: Vec<SliceAverages>,
}

impl BlockInput {
    /// Wraps a relaxed field on a unit grid (see [`unit_grid`]).
    pub fn new(relaxed: Magnetisation) -> Result<Self> {
        let g = *relaxed.grid();
        let expected = unit_grid(g.d, g.n[0], g.n_v)?;
        if g != expected {
            return Err(ConstructionError::Unresolvable(format!(
                "not a unit block grid: {g:?}"
            )));
        }
        if let Some(v) = relaxed.values().iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(ConstructionError::AverageOutOfRange { value: *v });
        }
        let size = [g.n[0], if g.d == 2 { g.n[1] } else { 1 }];
        let profile = (0..g.n_v)
            .map(|s| SliceAverages {
                y: (s as f64 + 0.5) / g.n_v as f64,
                averages: tile_averages(g.d, g.n, size, relaxed.slice(s))[0],
            })
            .collect();
        Ok(Self {
            relaxed: relaxed.relaxed(),
            profile,
        })
    }

    /// The relaxed input that is constant on every sub-plaquette of every
    /// slice; `fine[s]` lists the `2^d` sub-plaquette values of slice `s`.
    pub fn from_sub_averages(d: usize, cells: usize, fine: &[Vec<f64>]) -> Result<Self> {
        let g = unit_grid(d, cells, fine.len())?;
        let subs = 1 << d;
        for row in fine {
            if row.len() != subs {
                return Err(ConstructionError::Unresolvable(format!(
                    "{} sub-plaquette averages, expected {subs}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(v.abs() <= 1.0)) {
                return Err(ConstructionError::AverageOutOfRange { value: *v });
            }
        }
        let h = cells / 2;
        let m = Magnetisation::from_fn(g, Mode::Relaxed, |i0, i1, s| {
            let j = if d == 2 { i1 / h } else { 0 };
            fine[s][i0 / h + 2 * j]
        })?;
        Self::new(m)
    }

    /// Constant relaxed input `value`.
    pub fn uniform(d: usize, cells: usize, slices: usize, value: f64) -> Result<Self> {
        Self::from_sub_averages(d, cells, &vec![vec![value; 1 << d]; slices])
    }

    /// The sampled relaxed field.
    pub fn relaxed(&self) -> &Magnetisation {
        &self.relaxed
    }

    /// Unit grid of the block.
    pub fn grid(&self) -> &GridSpec {
        self.relaxed.grid()
    }

    /// Averages of every slice, bottom first.
    pub fn slice_profile(&self) -> &[SliceAverages] {
        &self.profile
    }

    /// Plaquette average in the top slice (the unrefined face).
    pub fn coarse_avg(&self) -> f64 {
        self.profile.last().map_or(0.0, |p| p.averages.coarse)
    }

    /// Sub-plaquette averages in the bottom slice (the refined face).
    pub fn fine_avgs(&self) -> Vec<f64> {
        let subs = 1 << self.grid().d;
        self.profile
            .first()
            .map_or(vec![], |p| p.averages.fine[..subs].to_vec())
    }
}

/// The `±1` block for `inp` with the refined face at the bottom.
///
/// Slice `s` takes the pattern of height `y = (s + ½)/n`: on `y ≥ ½` every
/// row is `+1` on `[0, η₁] ∪ [½, η₂]`, below every sub-plaquette row is
/// `+1` on its first `(1 + M̄)/2` with the blended average `M̄`. Cell
/// counts are rounded to the nearest integers that keep the number of
/// `+1` cells per slice equal to the rounded ideal, so slice averages are
/// preserved exactly when the ideal counts are integers.
pub fn building_block(inp: &BlockInput) -> Result<Magnetisation> {
    let g = *inp.grid();
    let size = [g.n[0], if g.d == 2 { g.n[1] } else { 1 }];
    let tile = [Tile {
        origin: [0, 0],
        size,
    }];
    let mut values = vec![0.0; g.cells()];
    for (s, p) in inp.profile.iter().enumerate() {
        let out = &mut values[g.slice_cells() * s..g.slice_cells() * (s + 1)];
        fill_slice(g.d, g.n[0], &tile, &[p.averages], p.y, out);
    }
    Ok(Magnetisation::new(g, values, Mode::Sharp)?)
}

/// Which horizontal face of a block carries the refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Refined at the bottom face: blocks of the lower half, refining
    /// towards the bottom of the slab.
    RefineDown,
    /// Refined at the top face: mirror image used in the upper half.
    RefineUp,
}

/// Placement of one building block in the slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockGeometry {
    /// Refinement level `k ≥ 1`.
    pub level: usize,
    /// Plaquette indices `i_n ∈ [-2^k N, 2^k N)`; the plaquette is
    /// `[i_n σ_h, (i_n + 1) σ_h]` along axis `n`.
    pub index: [i64; 2],
    /// Horizontal scale `2^{-k} L/N`.
    pub sigma_h: f64,
    /// Vertical scale `(2^{3/2})^{-k}(T/2)(2^{3/2} - 1)`, the height of the
    /// continuum interval.
    pub sigma_v: f64,
    pub orientation: Orientation,
    /// Shift `b` with block = `S_k([0,1]^{d+1} + b)` in continuum
    /// coordinates (horizontal entries as `index`, last entry the lower
    /// height over `σ_v`).
    pub shift: [f64; 3],
    /// Snapped cells `[lo, hi)` per horizontal axis.
    pub cells_lo: [usize; 2],
    pub cells_hi: [usize; 2],
    /// Snapped slices `[k_lo, k_hi)`.
    pub slices: [usize; 2],
}

impl BlockGeometry {
    /// Continuum geometry of block `index` on level `k` of the slab of
    /// half-width `l` and height `t` with `n_blocks` top-level blocks.
    pub fn continuum(
        level: usize,
        index: [i64; 2],
        l: f64,
        t: f64,
        n_blocks: usize,
        orientation: Orientation,
    ) -> Self {
        let r = vertical_ratio();
        let sigma_h = l / (n_blocks as f64 * 2.0_f64.powi(level as i32));
        let sigma_v = r.powi(-(level as i32)) * t / 2.0 * (r - 1.0);
        let z_lo = match orientation {
            Orientation::RefineDown => r.powi(-(level as i32)) * t / 2.0,
            Orientation::RefineUp => t - r.powi(-(level as i32 - 1)) * t / 2.0,
        };
        Self {
            level,
            index,
            sigma_h,
            sigma_v,
            orientation,
            shift: [index[0] as f64, index[1] as f64, z_lo / sigma_v],
            cells_lo: [0; 2],
            cells_hi: [0; 2],
            slices: [0; 2],
        }
    }
}
