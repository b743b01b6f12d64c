//! Corrector fields of a `d = 2` building block.
//!
//! Rearranging the relaxed input `M` into the sharp block `m̃` creates the
//! excess charge `∂₃(m̃ - M)` on every interior level. The corrector `H`
//! satisfies `∂₃(m̃ - M) + ∇'·H = 0` with zero normal flux on the sides.
//! On the coarse half it is the sum of the interface field
//! `-(1 + M̄)e₁` between `η₁` and `η₂`, its slope companion
//! `-y ∂₃M̄ e₁` on the same strip, and a Neumann remainder. On the refined
//! half the interface and slope fields move charge inside each
//! sub-plaquette row and pass the imbalance of the two row bands through
//! staircase sectors of the right sub-plaquettes; a Neumann remainder
//! absorbs the rest, including all rasterisation effects.

use crate::block::BlockInput;
use crate::pattern::blended_average;
use crate::{ConstructionError, Result};
use branchlab_core::{GridSpec, Magnetisation, StrayField};
use branchlab_elliptic::{divergence, AxisBc, FacetField, PoissonSolver, SliceGrid};

/// The corrector of one block and its parts, one field level per interior
/// level of the block (the two face levels stay zero).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCorrectors {
    /// Interface field of the coarse half.
    pub interface_coarse: StrayField,
    /// Slope field of the coarse half.
    pub slope_coarse: StrayField,
    /// Neumann remainder of the coarse half.
    pub remainder_coarse: StrayField,
    /// Interface field of the refined half (row part plus sector part).
    pub interface_refined: StrayField,
    /// Slope field of the refined half (row part plus sector part).
    pub slope_refined: StrayField,
    /// Neumann remainder of the refined half.
    pub remainder_refined: StrayField,
    /// Sum of all parts.
    pub total: StrayField,
    /// Largest violation of `∂₃(m̃ - M) + ∇'·H = 0` on interior levels and
    /// of zero normal flux on the sides.
    pub residual: f64,
}

/// Levels of the interior: `1..n`, with block height `ℓ/n`.
fn interior_levels(g: &GridSpec) -> std::ops::Range<usize> {
    1..g.n_v
}

/// Builds the corrector fields of `m_tilde` against the relaxed input.
///
/// The corrector equation can hold exactly only if every slice of
/// `m_tilde` has the mean of the relaxed slice; [`crate::building_block`]
/// achieves this whenever the ideal cell counts are integers. Any
/// remaining mismatch shows up in `residual`.
pub fn block_correctors(inp: &BlockInput, m_tilde: &Magnetisation) -> Result<BlockCorrectors> {
    let g = *inp.grid();
    if g.d != 2 {
        return Err(ConstructionError::Dimension { d: g.d });
    }
    g.ensure_same(m_tilde.grid())?;
    let sg = g.slice_grid();
    let solver = PoissonSolver::new(sg, [AxisBc::Neumann; 2])?;
    let c = g.n[0];
    let h = c / 2;
    let n = g.n_v as f64;
    let mut parts: Vec<StrayField> = (0..6).map(|_| StrayField::zeros(g)).collect();
    let mut total = StrayField::zeros(g);
    let mut residual = 0.0_f64;
    let profile = inp.slice_profile();
    for l in interior_levels(&g) {
        let y = l as f64 / n;
        let (lo, hi) = (profile[l - 1].averages, profile[l].averages);
        let a = 0.5 * (lo.coarse + hi.coarse);
        let da = (hi.coarse - lo.coarse) * n;
        let mut interface = FacetField::zeros(&sg);
        let mut slope = FacetField::zeros(&sg);
        if y >= 0.5 {
            if y * (1.0 + a) / 2.0 <= 0.5 {
                let (e1, e2) = (
                    crate::pattern::eta_first(y, a),
                    crate::pattern::eta_second(y, a),
                );
                for i1 in 0..c {
                    for f0 in 1..c {
                        let x = f0 as f64 / c as f64;
                        if e1 <= x && x <= e2 {
                            interface.comps[0][sg.facet0(f0, i1)] = -(1.0 + a);
                            slope.comps[0][sg.facet0(f0, i1)] = -y * da;
                        }
                    }
                }
            }
        } else {
            let fine: [f64; 4] = std::array::from_fn(|q| 0.5 * (lo.fine[q] + hi.fine[q]));
            let dfine: [f64; 4] = std::array::from_fn(|q| (hi.fine[q] - lo.fine[q]) * n);
            let eta: [f64; 4] = std::array::from_fn(|q| {
                (q % 2) as f64 / 2.0 + (1.0 + blended_average(y, fine[q], a)) / 4.0
            });
            let row_coef: [f64; 4] = std::array::from_fn(|q| a - fine[q]);
            let row_slope: [f64; 4] = std::array::from_fn(|q| y * (da - dfine[q]));
            for j in 0..2 {
                let (left, right) = (2 * j, 2 * j + 1);
                for i1 in j * h..(j + 1) * h {
                    for f0 in 1..c {
                        let x = f0 as f64 / c as f64;
                        let idx = sg.facet0(f0, i1);
                        if f0 < h {
                            if x >= eta[left] {
                                interface.comps[0][idx] = -row_coef[left];
                                slope.comps[0][idx] = -row_slope[left];
                            }
                        } else if x <= eta[right] {
                            interface.comps[0][idx] = row_coef[right];
                            slope.comps[0][idx] = row_slope[right];
                        }
                    }
                }
            }
            let band = [2.0 * a - fine[0] - fine[1], 2.0 * a - fine[2] - fine[3]];
            let band_slope = [
                y * (2.0 * da - dfine[0] - dfine[1]),
                y * (2.0 * da - dfine[2] - dfine[3]),
            ];
            add_sectors(&sg, h, band, &mut interface);
            add_sectors(&sg, h, band_slope, &mut slope);
        }
        let rho: Vec<f64> = m_tilde
            .charge_level(l)?
            .iter()
            .zip(inp.relaxed().charge_level(l)?)
            .map(|(t, r)| t - r)
            .collect();
        let mut explicit = interface.clone();
        explicit.add_assign(&slope);
        let div_e = divergence(&sg, &explicit)?;
        let src: Vec<f64> = rho.iter().zip(&div_e).map(|(r, d)| r - d).collect();
        let u = solver.solve_projected(&src);
        let mut rem = solver.gradient(&u)?;
        rem.scale(-1.0);
        let mut sum = explicit;
        sum.add_assign(&rem);
        let div = divergence(&sg, &sum)?;
        for (dv, r) in div.iter().zip(&rho) {
            residual = residual.max((dv - r).abs());
        }
        residual = residual.max(side_flux(&sg, &sum));
        let offset = if y >= 0.5 { 0 } else { 3 };
        parts[offset].set_level(l, &interface)?;
        parts[offset + 1].set_level(l, &slope)?;
        parts[offset + 2].set_level(l, &rem)?;
        total.set_level(l, &sum)?;
    }
    let mut it = parts.into_iter();
    let mut next = || it.next().expect("six parts");
    Ok(BlockCorrectors {
        interface_coarse: next(),
        slope_coarse: next(),
        remainder_coarse: next(),
        interface_refined: next(),
        slope_refined: next(),
        remainder_refined: next(),
        total,
        residual,
    })
}

/// Adds the staircase transport of the band imbalances through the right
/// sub-plaquettes: in the lower-right quarter the field `-band[0](e₁ + e₂)`
/// fills the cells on and above the diagonal from its lower-left corner, in
/// the upper-right quarter `-band[1](e₁ - e₂)` fills the mirrored cells.
/// Each part is divergence-free inside its quarter, and the two meet on the
/// middle line with equal normal components when the bands balance.
fn add_sectors(sg: &SliceGrid, h: usize, band: [f64; 2], field: &mut FacetField) {
    for v in 0..h {
        for u in 0..h {
            let i0 = h + u;
            if u <= v {
                field.comps[0][sg.facet0(i0, v)] -= band[0];
                field.comps[1][sg.facet1(i0, v + 1)] -= band[0];
            }
            let w = v;
            if u + w < h {
                field.comps[0][sg.facet0(i0, h + w)] -= band[1];
                if w >= 1 {
                    field.comps[1][sg.facet1(i0, h + w)] += band[1];
                }
            }
        }
    }
}

/// Largest normal component on the four sides of a slice.
fn side_flux(sg: &SliceGrid, f: &FacetField) -> f64 {
    let [n0, n1] = sg.n;
    let mut worst = 0.0_f64;
    for i1 in 0..n1 {
        worst = worst
            .max(f.comps[0][sg.facet0(0, i1)].abs())
            .max(f.comps[0][sg.facet0(n0, i1)].abs());
    }
    for i0 in 0..n0 {
        worst = worst
            .max(f.comps[1][sg.facet1(i0, 0)].abs())
            .max(f.comps[1][sg.facet1(i0, n1)].abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::building_block;

    #[test]
    fn sectors_are_divergence_free_inside_and_balance_the_bands() {
        let sg = SliceGrid::plane([8, 8], [0.125, 0.125]);
        let mut f = FacetField::zeros(&sg);
        add_sectors(&sg, 4, [0.3, -0.3], &mut f);
        let div = divergence(&sg, &f).unwrap();
        // Charge only in the left column of the right half, where the row
        // fields hand over: +0.3/Δx per lower row, -0.3/Δx per upper row.
        for i1 in 0..8 {
            for i0 in 0..8 {
                let v = div[i0 + 8 * i1];
                if i0 == 3 {
                    let want = if i1 < 4 { -0.3 / 0.125 } else { 0.3 / 0.125 };
                    assert!((v - want).abs() < 1e-12, "({i0},{i1}) {v}");
                } else {
                    assert!(v.abs() < 1e-12, "({i0},{i1}) {v}");
                }
            }
        }
    }

    #[test]
    fn one_dimensional_blocks_have_no_correctors() {
        let inp = BlockInput::uniform(1, 8, 4, 0.0).unwrap();
        let m = building_block(&inp).unwrap();
        assert!(matches!(
            block_correctors(&inp, &m),
            Err(ConstructionError::Dimension { d: 1 })
        ));
    }
}
