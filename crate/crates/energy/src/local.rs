//! Energies of boxes, height averages and the local quantities `f`, `n`.
//!
//! A box field is a [`StrayField`] on the grid of a sub-box (see
//! [`branchlab_core::CellBox::sub_grid`]); its level and facet weights give
//! cut faces half weight, so box energies add up over partitions.
//!
//! With `W = Σ_k w_k` and `S = Σ_k w_k h_k` per facet, the height average
//! is `h̄ = S / W` and the shifted field energy is
//! `½ Δz Σ_k w_k |h_k - h̄|² = ½ Δz (Σ_k w_k |h_k|² - W |h̄|²)`, which is the
//! discrete orthogonality identity.
//!
//! In the local quantities, averages of the interfacial term are taken over
//! the box volume `(2ℓ)^d t` (`t` = slices × `Δz`), and averages of field
//! terms over `(2ℓ)^d t_h`, where `t_h = W Δz` is the height represented by
//! the box's field levels. With this normalisation a height-constant field
//! `c` has `⨍ ½|h|² = ½|c|²` and `n = t|c|/ℓ` exactly.

use crate::interfacial::interfacial_energy_in;
use crate::stray::{field_energy, level_sq_norm, minimal_stray_energy};
use crate::{EnergyError, Result};
use branchlab_core::{restrict_field, CellBox, GridSpec, Magnetisation, StrayField, SubCuboid};
use branchlab_elliptic::{pairwise_sum, FacetField};

/// Energy of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `∫|∇'m|` (not multiplied by `σ`).
    pub interfacial: f64,
    /// `½ ∫|h|²`.
    pub stray: f64,
    /// `σ · interfacial + stray`.
    pub total: f64,
    /// `total / volume`.
    pub density: f64,
    /// Interface energy per cross-section area.
    pub sigma: f64,
    /// Box volume `(2ℓ)^d t`.
    pub volume: f64,
}

impl EnergyBreakdown {
    /// Assembles the totals from the two parts.
    pub fn new(interfacial: f64, stray: f64, sigma: f64, volume: f64) -> Self {
        let total = sigma * interfacial + stray;
        Self {
            interfacial,
            stray,
            total,
            density: total / volume,
            sigma,
            volume,
        }
    }
}

/// Energy of `m` with its minimal stray field on the whole grid.
pub fn total_energy(m: &Magnetisation, sigma: f64) -> Result<EnergyBreakdown> {
    let stray = minimal_stray_energy(m)?;
    Ok(EnergyBreakdown::new(
        crate::interfacial_energy(m),
        stray,
        sigma,
        m.grid().volume(),
    ))
}

/// Energy of the pair `(m, h)` on the whole grid.
pub fn pair_energy(m: &Magnetisation, h: &StrayField, sigma: f64) -> Result<EnergyBreakdown> {
    m.grid().ensure_same(h.grid())?;
    Ok(EnergyBreakdown::new(
        crate::interfacial_energy(m),
        field_energy(h),
        sigma,
        m.grid().volume(),
    ))
}

/// Energy inside the box `cb` of the global `m` and the box field `h_box`.
pub fn box_energy(
    m: &Magnetisation,
    h_box: &StrayField,
    cb: &CellBox,
    sigma: f64,
) -> Result<EnergyBreakdown> {
    let sub = cb.sub_grid(m.grid())?;
    sub.ensure_same(h_box.grid())?;
    Ok(EnergyBreakdown::new(
        interfacial_energy_in(m, cb),
        field_energy(h_box),
        sigma,
        sub.volume(),
    ))
}

/// Weighted height integral `Σ_k w_k Δz h_k` of a box field.
pub fn cumulated_field(h: &StrayField) -> FacetField {
    let g = *h.grid();
    let mut out = FacetField {
        comps: [vec![0.0; g.facets(0)], vec![0.0; g.facets(1)]],
    };
    for k in 0..g.levels() {
        let w = g.level_weight(k) * g.dz();
        let lv = h.level(k);
        for a in 0..2 {
            for (o, v) in out.comps[a].iter_mut().zip(lv[a]) {
                *o += w * v;
            }
        }
    }
    out
}

/// Weighted height average `h̄` of a box field.
pub fn box_height_average(h: &StrayField) -> FacetField {
    let mut c = cumulated_field(h);
    c.scale(1.0 / h.grid().field_height());
    c
}

/// Height average of `h` over the bottom `slices` slices, full width.
pub fn height_average(h: &StrayField, slices: usize) -> Result<FacetField> {
    let g = h.grid();
    let cb = CellBox {
        lo: [0, 0],
        hi: g.n,
        k_lo: 0,
        k_hi: slices,
    };
    Ok(box_height_average(&restrict_field(h, &cb)?))
}

/// The three terms of the orthogonality identity for a box field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthogonality {
    /// `½ ∫|h - h̄|²`, summed directly.
    pub shifted: f64,
    /// `½ ∫|h|²`.
    pub full: f64,
    /// `½ ∫|h̄|²` over the box height.
    pub mean_part: f64,
}

impl Orthogonality {
    /// Relative defect of `shifted = full - mean_part`.
    pub fn relative_defect(&self) -> f64 {
        (self.shifted - (self.full - self.mean_part)).abs() / self.full.max(f64::MIN_POSITIVE)
    }
}

/// Evaluates both sides of the orthogonality identity.
pub fn orthogonality(h: &StrayField) -> Orthogonality {
    let g = *h.grid();
    let mean = box_height_average(h);
    let mean_ref = [mean.comps[0].as_slice(), mean.comps[1].as_slice()];
    let shifted = shifted_energy(h, &mean);
    let full = field_energy(h);
    let mean_part = 0.5 * g.field_height() * level_sq_norm(&g, mean_ref);
    Orthogonality {
        shifted,
        full,
        mean_part,
    }
}

/// `½ Σ_k w_k Δz ∫|h_k - shift|²`.
fn shifted_energy(h: &StrayField, shift: &FacetField) -> f64 {
    let g = *h.grid();
    let mut diff = [vec![0.0; g.facets(0)], vec![0.0; g.facets(1)]];
    let mut per_level = Vec::with_capacity(g.levels());
    for k in 0..g.levels() {
        let lv = h.level(k);
        for a in 0..2 {
            for ((d, v), s) in diff[a].iter_mut().zip(lv[a]).zip(&shift.comps[a]) {
                *d = v - s;
            }
        }
        let norm = level_sq_norm(&g, [&diff[0], &diff[1]]);
        per_level.push(0.5 * g.level_weight(k) * g.dz() * norm);
    }
    pairwise_sum(&per_level)
}

/// Largest cell value of `|F|² = Σ_a max(F_a(left)², F_a(right)²)`.
///
/// Every facet-weighted integral of `|F|²` over the slice is bounded by the
/// cross-section times this value.
pub fn facet_sup_sq(grid: &GridSpec, field: &FacetField) -> f64 {
    let sg = grid.slice_grid();
    let [n0, n1] = grid.n;
    let mut worst = 0.0_f64;
    for i1 in 0..n1 {
        for i0 in 0..n0 {
            let mut v = field.comps[0][sg.facet0(i0, i1)]
                .powi(2)
                .max(field.comps[0][sg.facet0(i0 + 1, i1)].powi(2));
            if grid.d == 2 {
                v += field.comps[1][sg.facet1(i0, i1)]
                    .powi(2)
                    .max(field.comps[1][sg.facet1(i0, i1 + 1)].powi(2));
            }
            worst = worst.max(v);
        }
    }
    worst
}

/// Local quantities of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStats {
    /// `(t²/ℓ²)(σ ⨍|∇'m| + ½ ⨍|h - h̄|²)`.
    pub f: f64,
    /// `(t²/ℓ²)(σ ⨍|∇'m| + ½ ⨍|h|²)`.
    pub f0: f64,
    /// `(t/ℓ) sup |h̄|`.
    pub n: f64,
    /// Energy density `σ ⨍|∇'m| + ½ ⨍|h|²`.
    pub e: f64,
    /// Half-width `ℓ` of the box.
    pub half: f64,
    /// Height `t` of the box.
    pub height: f64,
    /// Cells covered.
    pub cells: CellBox,
    /// `(ℓ²/t²) f + ½ (ℓ²/t²) n²`, an upper bound for `e`.
    pub reconstruction: f64,
}

/// Local quantities of the sub-box `sub`, using the restriction of the
/// global field `h`.
pub fn local_stats(
    m: &Magnetisation,
    h: &StrayField,
    sub: &SubCuboid,
    sigma: f64,
) -> Result<LocalStats> {
    m.grid().ensure_same(h.grid())?;
    let cb = sub.to_cells(m.grid())?;
    local_stats_box(m, &restrict_field(h, &cb)?, &cb, sigma)
}

/// Local quantities of the box `cb` from the global `m` and the box field.
pub fn local_stats_box(
    m: &Magnetisation,
    h_box: &StrayField,
    cb: &CellBox,
    sigma: f64,
) -> Result<LocalStats> {
    let sub = cb.sub_grid(m.grid())?;
    sub.ensure_same(h_box.grid())?;
    let half = (0..sub.d).map(|a| sub.half[a]).fold(0.0_f64, f64::max);
    let height = sub.height;
    let vol = sub.volume();
    let field_vol = sub.cross_section() * sub.field_height();
    let tv = sigma * interfacial_energy_in(m, cb) / vol;
    let mean = box_height_average(h_box);
    let shifted = shifted_energy(h_box, &mean) / field_vol;
    let full = field_energy(h_box) / field_vol;
    let aspect = (height / half).powi(2);
    let f = aspect * (tv + shifted);
    let f0 = aspect * (tv + full);
    let e = tv + full;
    let n = height / half * facet_sup_sq(&sub, &mean).sqrt();
    let reconstruction = f / aspect + 0.5 * n * n / aspect;
    Ok(LocalStats {
        f,
        f0,
        n,
        e,
        half,
        height,
        cells: *cb,
        reconstruction,
    })
}

/// `(t²/ℓ²) ⨍_{Q_{ℓ,t}} |h - h̄_t|²` for the bottom-anchored boxes with
/// horizontal section `[lo, hi)` and the given slice counts.
///
/// The value is non-decreasing in `t`: it is `t²/(ℓ² t_h)` times the
/// weighted variance `Σ_k w_k Δz |h_k - h̄|²`. Growing the box only adds
/// levels and raises weights, which cannot decrease the variance about the
/// best constant, and `t²/t_h` grows with every added slice.
pub fn monotonicity_profile(
    h: &StrayField,
    lo: [usize; 2],
    hi: [usize; 2],
    slices: &[usize],
) -> Result<Vec<f64>> {
    if slices.is_empty() {
        return Err(EnergyError::Empty("slice counts"));
    }
    if slices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EnergyError::NotIncreasing);
    }
    slices
        .iter()
        .map(|&nt| {
            let cb = CellBox {
                lo,
                hi,
                k_lo: 0,
                k_hi: nt,
            };
            let hb = restrict_field(h, &cb)?;
            let sub = *hb.grid();
            let half = (0..sub.d).map(|a| sub.half[a]).fold(0.0_f64, f64::max);
            let mean = box_height_average(&hb);
            let var = 2.0 * shifted_energy(&hb, &mean) / (sub.cross_section() * sub.field_height());
            Ok((sub.height / half).powi(2) * var)
        })
        .collect()
}

/// Outcome of [`good_width`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodWidth {
    /// Selected half-width `ρ`.
    pub rho: f64,
    /// `ρ` in cells.
    pub cells: usize,
    /// `⨍_{∂Q'_ρ × [0,t]} (h·ν)²` at the selected width.
    pub trace: f64,
    /// The admissible threshold `2^d A ⨍_{Q'_{ℓ_hi} × [0,t]} |h|²`.
    pub threshold: f64,
}

/// Smallest half-width `ρ ∈ [ℓ_lo, ℓ_hi]` (in whole cells) whose boundary
/// trace energy over the bottom `t` is at most `2^d A` times the bulk
/// average over `Q'_{ℓ_hi}`.
///
/// The squares are centred at the grid vertex `a`. Summing the trace over
/// all widths of `[ℓ_hi/2, ℓ_hi]` counts every normal facet at most once,
/// so for `A ≥ 1` a good width exists in that range.
pub fn good_width(
    h: &StrayField,
    a: [f64; 2],
    l_lo: f64,
    l_hi: f64,
    t: f64,
    factor: f64,
) -> Result<GoodWidth> {
    let g = *h.grid();
    let outer = SubCuboid::bottom(a, l_hi, t).to_cells(&g)?;
    let hb = restrict_field(h, &outer)?;
    let sub = *hb.grid();
    let bulk = 2.0 * field_energy(&hb) / sub.volume();
    let threshold = 2f64.powi(g.d as i32) * factor * bulk;
    let dx = g.dx(0);
    let r_lo = (l_lo / dx).round() as usize;
    let r_hi = (l_hi / dx).round() as usize;
    let sg = g.slice_grid();
    for r in r_lo.max(1)..=r_hi {
        let ring = SubCuboid::bottom(a, r as f64 * dx, t).to_cells(&g)?;
        let mut acc = 0.0;
        let mut measure = 0.0;
        for k in 0..=outer.k_hi {
            let w = sub.level_weight(k) * g.dz();
            let [c0, c1] = h.level(k);
            let mut level = 0.0;
            let mut level_measure = 0.0;
            for i1 in ring.lo[1]..ring.hi[1] {
                for f0 in [ring.lo[0], ring.hi[0]] {
                    level += c0[sg.facet0(f0, i1)].powi(2) * sg.facet_measure(0);
                    level_measure += sg.facet_measure(0);
                }
            }
            if g.d == 2 {
                for f1 in [ring.lo[1], ring.hi[1]] {
                    for i0 in ring.lo[0]..ring.hi[0] {
                        level += c1[sg.facet1(i0, f1)].powi(2) * sg.facet_measure(1);
                        level_measure += sg.facet_measure(1);
                    }
                }
            }
            acc += w * level;
            measure = level_measure;
        }
        let trace = acc / (measure * sub.height);
        if trace <= threshold {
            return Ok(GoodWidth {
                rho: r as f64 * dx,
                cells: r,
                trace,
                threshold,
            });
        }
    }
    Err(EnergyError::NoGoodWidth { lo: r_lo, hi: r_hi })
}
