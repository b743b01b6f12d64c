//! Dyadic assembly of building blocks into a sharp competitor on the slab.
//!
//! The lower half `(0, T/2]` is split into the intervals
//! `I_k = [r^{-k}T/2, r^{-(k-1)}T/2]`, `r = 2^{3/2}`, for `k = 1..K`; level
//! `k` carries `(2^{k+1}N)^d` blocks of width `2^{-k}L/N`, refined at the
//! bottom face into the plaquettes of level `k + 1`. The upper half is the
//! mirror image. Below `I_K` (and above its mirror) the refined pattern of
//! level `K` continues up to the slab faces.

use crate::block::{vertical_ratio, BlockGeometry, Orientation};
use crate::pattern::{apportion, fill_slice, tile_averages, tiling};
use crate::{ConstructionError, Result};
use branchlab_core::{CellBox, GridSpec, LateralBc, Magnetisation, Mode, StrayField, VerticalFace};
use branchlab_elliptic::pairwise_sum;
use branchlab_energy::{interfacial_energy_in, level_solver, minimal_stray_field, EnergyBreakdown};
use rayon::prelude::*;
use serde::Serialize;

/// Tolerance on the slice means of the relaxed input.
pub const SLICE_MEAN_TOL: f64 = 1e-10;

/// Number of top-level blocks balancing the two energy terms:
/// `max(1, round(L/T^{2/3}))`.
pub fn choose_n(l: f64, t: f64) -> usize {
    choose_n_sigma(l, t, 1.0)
}

/// Balancing block count for interface energy density `σ`:
/// `max(1, round(L/(σ^{1/3}T^{2/3})))`.
pub fn choose_n_sigma(l: f64, t: f64, sigma: f64) -> usize {
    let n = (l / (sigma.cbrt() * t.powf(2.0 / 3.0))).round();
    if n.is_finite() && n >= 1.0 {
        n as usize
    } else {
        1
    }
}

/// Top-level block count `N` and number of refinement levels `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchingConfig {
    pub n_blocks: usize,
    pub levels: usize,
}

/// Slice bounds of the vertical intervals of the lower half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalTiling {
    /// Slices of the lower half (`n_v / 2`).
    pub half: usize,
    /// `lower[k-1]` is the first slice of `I_k`.
    pub lower: Vec<usize>,
}

impl VerticalTiling {
    /// Slices `[lo, hi)` of `I_k` in the lower half.
    pub fn interval(&self, k: usize) -> (usize, usize) {
        let hi = if k == 1 { self.half } else { self.lower[k - 2] };
        (self.lower[k - 1], hi)
    }

    /// Slices below the finest interval.
    pub fn truncated(&self) -> usize {
        *self.lower.last().expect("at least one level")
    }
}

/// Snaps the intervals `I_1..I_K` and the remainder below `I_K` to whole
/// slices of the lower half by largest-remainder rounding. Every interval
/// needs at least two slices.
pub fn vertical_tiling(n_v: usize, levels: usize) -> Result<VerticalTiling> {
    if levels == 0 {
        return Err(ConstructionError::Unresolvable(
            "at least one refinement level is needed".into(),
        ));
    }
    if n_v % 2 != 0 {
        return Err(ConstructionError::Unresolvable(format!(
            "n_v = {n_v} must be even"
        )));
    }
    let half = n_v / 2;
    let r = vertical_ratio();
    let mut ideal: Vec<f64> = (1..=levels)
        .map(|k| half as f64 * r.powi(-(k as i32)) * (r - 1.0))
        .collect();
    ideal.push(half as f64 * r.powi(-(levels as i32)));
    let counts = apportion(&ideal, half);
    let mut lower = Vec::with_capacity(levels);
    let mut top = half;
    for (k, &c) in counts[..levels].iter().enumerate() {
        if c < 2 {
            return Err(ConstructionError::Unresolvable(format!(
                "level {} gets {c} slices of {half} (need 2); use more slices or fewer levels",
                k + 1
            )));
        }
        top -= c;
        lower.push(top);
    }
    Ok(VerticalTiling { half, lower })
}

/// Level and block height of every slice; slices outside the intervals
/// take the refined face (`y = 0`) of level `K`.
fn slice_roles(n_v: usize, vt: &VerticalTiling) -> Vec<(usize, f64)> {
    let levels = vt.lower.len();
    (0..n_v)
        .map(|s| {
            let s = if s < vt.half { s } else { n_v - 1 - s };
            for k in 1..=levels {
                let (lo, hi) = vt.interval(k);
                if (lo..hi).contains(&s) {
                    return (
                        k,
                        (s - lo) as f64 / (hi - lo) as f64 + 0.5 / (hi - lo) as f64,
                    );
                }
            }
            (levels, 0.0)
        })
        .collect()
}

/// Plaquettes per axis on level `k`.
fn plaquettes(k: usize, n_blocks: usize) -> usize {
    (1usize << (k + 1)) * n_blocks
}

/// Tile size in cells on level `k`.
fn tile_size(g: &GridSpec, k: usize, n_blocks: usize) -> [usize; 2] {
    let p = plaquettes(k, n_blocks);
    [g.n[0] / p, if g.d == 2 { g.n[1] / p } else { 1 }]
}

/// Checks that `grid` resolves every plaquette down to level `K` with
/// tiles of at least four cells per side (a multiple of four).
pub fn check_resolution(grid: &GridSpec, cfg: &BranchingConfig) -> Result<VerticalTiling> {
    if cfg.n_blocks == 0 {
        return Err(ConstructionError::Unresolvable(
            "N must be at least 1".into(),
        ));
    }
    let vt = vertical_tiling(grid.n_v, cfg.levels)?;
    let p = plaquettes(cfg.levels, cfg.n_blocks);
    for a in 0..grid.d {
        if grid.n[a] % p != 0 || (grid.n[a] / p) % 4 != 0 {
            return Err(ConstructionError::Unresolvable(format!(
                "{} cells on axis {a} cannot hold {p} plaquettes of a multiple of 4 cells (N = {}, K = {})",
                grid.n[a], cfg.n_blocks, cfg.levels
            )));
        }
    }
    Ok(vt)
}

/// One block of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockRecord {
    #[serde(flatten)]
    pub geometry: BlockGeometry,
    /// Plaquette average of the relaxed input in the slice at the
    /// unrefined face.
    pub coarse_avg: f64,
    /// Sub-plaquette averages in the slice at the refined face.
    pub fine_avgs: Vec<f64>,
    /// Interface measure on the block's lateral faces towards neighbouring
    /// blocks, in units of `σ_h^{d-1} σ_v` (one straight interface across a
    /// face counts 1).
    pub side_jumps: f64,
}

/// Measured quantities of an assembled competitor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingReport {
    pub config: BranchingConfig,
    /// `∫|∇'m̃|`.
    pub interfacial: f64,
    /// `½∫|h̃|²` of the minimal field.
    pub stray: f64,
    pub volume: f64,
    /// `⨍|h̃ - h_rel|²` with both fields minimal for their magnetisation.
    pub field_distance: f64,
    /// Interface energy of the slices of level `k` (both halves), index
    /// `k - 1`.
    pub interfacial_per_level: Vec<f64>,
    /// Field energy of level `k`; a charge level between two slices is
    /// shared equally.
    pub field_per_level: Vec<f64>,
    /// Interface energy of the continued pattern beyond level `K`.
    pub truncation_interfacial: f64,
    /// Field energy of the continued pattern beyond level `K`.
    pub truncation_field: f64,
    /// Largest [`BlockRecord::side_jumps`] over all blocks.
    pub max_side_jumps: f64,
    /// Largest `|mean m̃ - mean m_rel|` over slices.
    pub slice_mean_defect: f64,
}

impl BranchingReport {
    /// Energy with interface density `sigma`.
    pub fn energy(&self, sigma: f64) -> EnergyBreakdown {
        EnergyBreakdown::new(self.interfacial, self.stray, sigma, self.volume)
    }

    /// Ratios `x_{k+1}/x_k` of consecutive per-level values.
    pub fn decay(values: &[f64]) -> Vec<f64> {
        values.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Assembled competitor.
#[derive(Debug, Clone, PartialEq)]
pub struct Branching {
    /// The sharp magnetisation `m̃`.
    pub m: Magnetisation,
    pub blocks: Vec<BlockRecord>,
    pub report: BranchingReport,
}

impl Branching {
    /// The minimal stray field `h̃` of `m̃`.
    pub fn field(&self) -> Result<StrayField> {
        Ok(minimal_stray_field(&self.m)?)
    }
}

fn check_input(m_rel: &Magnetisation) -> Result<()> {
    let g = m_rel.grid();
    for a in 0..g.d {
        if g.bc[a] != LateralBc::ZeroFlux {
            return Err(ConstructionError::Inadmissible(format!(
                "axis {a} must carry zero flux"
            )));
        }
    }
    if g.bottom != VerticalFace::Closed || g.top != VerticalFace::Closed {
        return Err(ConstructionError::Inadmissible(
            "both horizontal faces must be closed".into(),
        ));
    }
    for (s, mean) in m_rel.slice_means().iter().enumerate() {
        if mean.abs() > SLICE_MEAN_TOL {
            return Err(ConstructionError::Inadmissible(format!(
                "slice {s} has mean {mean}"
            )));
        }
    }
    Ok(())
}

/// Builds the branching competitor for the relaxed input `m_rel` on its
/// zero-flux slab.
///
/// Every slice is the rasterised pattern of its level with the plaquette
/// averages of `m_rel` in that slice, so the slice means of `m_rel` (zero
/// on a zero-flux slab) are reproduced exactly. The field is the minimal
/// stray field of `m̃`.
pub fn assemble_branching(m_rel: &Magnetisation, cfg: &BranchingConfig) -> Result<Branching> {
    let g = *m_rel.grid();
    check_input(m_rel)?;
    let vt = check_resolution(&g, cfg)?;
    let roles = slice_roles(g.n_v, &vt);
    let sc = g.slice_cells();
    let mut values = vec![0.0; g.cells()];
    values.par_chunks_mut(sc).enumerate().for_each(|(s, out)| {
        let (k, y) = roles[s];
        let size = tile_size(&g, k, cfg.n_blocks);
        let tiles = tiling(g.d, g.n, size);
        let avgs = tile_averages(g.d, g.n, size, m_rel.slice(s));
        fill_slice(g.d, g.n[0], &tiles, &avgs, y, out);
    });
    let m = Magnetisation::new(g, values, Mode::Sharp)?;
    let blocks = block_records(&m, m_rel, cfg, &vt)?;
    let report = measure(&m, m_rel, cfg, &vt, &roles, &blocks)?;
    Ok(Branching { m, blocks, report })
}

/// The competitor for `m_rel ≡ 0` on `grid`.
pub fn zero_branching(grid: &GridSpec, cfg: &BranchingConfig) -> Result<Branching> {
    assemble_branching(&Magnetisation::zeros(*grid), cfg)
}

fn block_records(
    m: &Magnetisation,
    m_rel: &Magnetisation,
    cfg: &BranchingConfig,
    vt: &VerticalTiling,
) -> Result<Vec<BlockRecord>> {
    let g = *m.grid();
    let mut out = Vec::new();
    for k in 1..=cfg.levels {
        let p = plaquettes(k, cfg.n_blocks);
        let size = tile_size(&g, k, cfg.n_blocks);
        let (lo, hi) = vt.interval(k);
        for orientation in [Orientation::RefineDown, Orientation::RefineUp] {
            let (k_lo, k_hi) = match orientation {
                Orientation::RefineDown => (lo, hi),
                Orientation::RefineUp => (g.n_v - hi, g.n_v - lo),
            };
            let (coarse_slice, fine_slice) = match orientation {
                Orientation::RefineDown => (k_hi - 1, k_lo),
                Orientation::RefineUp => (k_lo, k_hi - 1),
            };
            let coarse = tile_averages(g.d, g.n, size, m_rel.slice(coarse_slice));
            let fine = tile_averages(g.d, g.n, size, m_rel.slice(fine_slice));
            let rows = if g.d == 2 { p } else { 1 };
            let half = (p / 2) as i64;
            let level_records: Vec<BlockRecord> = (0..rows * p)
                .into_par_iter()
                .map(|b| {
                    let (p0, p1) = (b % p, b / p);
                    let index = [
                        p0 as i64 - half,
                        if g.d == 2 { p1 as i64 - half } else { 0 },
                    ];
                    let mut geometry = BlockGeometry::continuum(
                        k,
                        index,
                        g.half[0],
                        g.height,
                        cfg.n_blocks,
                        orientation,
                    );
                    geometry.cells_lo = [p0 * size[0], p1 * size[1]];
                    geometry.cells_hi = [(p0 + 1) * size[0], (p1 + 1) * size[1]];
                    geometry.slices = [k_lo, k_hi];
                    let side_jumps = side_jumps(m, &geometry);
                    BlockRecord {
                        geometry,
                        coarse_avg: coarse[b].coarse,
                        fine_avgs: fine[b].fine[..1 << g.d].to_vec(),
                        side_jumps,
                    }
                })
                .collect();
            out.extend(level_records);
        }
    }
    Ok(out)
}

/// Interface measure on the lateral faces of a block that touch other
/// blocks, in units of the snapped face area `σ_h^{d-1}σ_v`.
fn side_jumps(m: &Magnetisation, b: &BlockGeometry) -> f64 {
    let g = *m.grid();
    let mut acc = 0.0;
    for s in b.slices[0]..b.slices[1] {
        let slice = m.slice(s);
        for a in 0..g.d {
            let other = 1 - a;
            let measure = if g.d == 2 { g.dx(other) } else { 1.0 };
            let (t_lo, t_hi) = if g.d == 2 {
                (b.cells_lo[other], b.cells_hi[other])
            } else {
                (0, 1)
            };
            for f in [b.cells_lo[a], b.cells_hi[a]] {
                if f == 0 || f == g.n[a] {
                    continue;
                }
                for t in t_lo..t_hi {
                    let (i, j) = if a == 0 {
                        (f + g.n[0] * t, f - 1 + g.n[0] * t)
                    } else {
                        (t + g.n[0] * f, t + g.n[0] * (f - 1))
                    };
                    acc += 0.5 * (slice[i] - slice[j]).abs() * measure;
                }
            }
        }
    }
    let width = (b.cells_hi[0] - b.cells_lo[0]) as f64 * g.dx(0);
    let area = if g.d == 2 { width } else { 1.0 } * (b.slices[1] - b.slices[0]) as f64 * g.dz();
    acc * g.dz() / area
}

fn measure(
    m: &Magnetisation,
    m_rel: &Magnetisation,
    cfg: &BranchingConfig,
    vt: &VerticalTiling,
    roles: &[(usize, f64)],
    blocks: &[BlockRecord],
) -> Result<BranchingReport> {
    let g = *m.grid();
    let per_slice: Vec<f64> = (0..g.n_v)
        .map(|s| {
            interfacial_energy_in(
                m,
                &CellBox {
                    lo: [0, 0],
                    hi: g.n,
                    k_lo: s,
                    k_hi: s + 1,
                },
            )
        })
        .collect();
    let solver = level_solver(&g)?;
    let dz = g.dz();
    let level_pairs: Vec<(f64, f64)> = (0..g.levels())
        .into_par_iter()
        .map(|l| -> Result<(f64, f64)> {
            let rho = m.charge_level(l)?;
            solver
                .check_compatible(&rho)
                .map_err(|e| ConstructionError::Inadmissible(format!("level {l}: {e}")))?;
            let rho_rel = m_rel.charge_level(l)?;
            let w = 0.5 * g.level_weight(l) * dz;
            let own = solver.energy_of_spectrum(&solver.spectrum(&rho)?);
            let diff: Vec<f64> = rho.iter().zip(&rho_rel).map(|(a, b)| a - b).collect();
            let dist = solver.energy_of_spectrum(&solver.spectrum(&diff)?);
            Ok((w * own, w * dist))
        })
        .collect::<Result<_>>()?;
    let levels = cfg.levels;
    let truncated_slice = |s: usize| {
        let s = if s < vt.half { s } else { g.n_v - 1 - s };
        s < vt.truncated()
    };
    let mut interfacial_per_level = vec![0.0; levels];
    let mut field_per_level = vec![0.0; levels];
    let (mut trunc_i, mut trunc_f) = (0.0, 0.0);
    for (s, v) in per_slice.iter().enumerate() {
        if truncated_slice(s) {
            trunc_i += v;
        } else {
            interfacial_per_level[roles[s].0 - 1] += v;
        }
    }
    for (l, (e, _)) in level_pairs.iter().enumerate() {
        let adjacent: Vec<usize> = [l.checked_sub(1), (l < g.n_v).then_some(l)]
            .into_iter()
            .flatten()
            .collect();
        let share = e / adjacent.len() as f64;
        for s in adjacent {
            if truncated_slice(s) {
                trunc_f += share;
            } else {
                field_per_level[roles[s].0 - 1] += share;
            }
        }
    }
    let stray = pairwise_sum(&level_pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let dist = pairwise_sum(&level_pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let slice_mean_defect = m
        .slice_means()
        .iter()
        .zip(m_rel.slice_means())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(BranchingReport {
        config: *cfg,
        interfacial: pairwise_sum(&per_slice),
        stray,
        volume: g.volume(),
        field_distance: 2.0 * dist / g.volume(),
        interfacial_per_level,
        field_per_level,
        truncation_interfacial: trunc_i,
        truncation_field: trunc_f,
        max_side_jumps: blocks.iter().map(|b| b.side_jumps).fold(0.0, f64::max),
        slice_mean_defect,
    })
}
