//! Over-relaxed solution, generating fields and level-wise relaxed fields.

use crate::data::{boundary_facets, flux_field, BoundaryFacet};
use crate::{BoundaryData, RelaxedError, Result, COMPATIBILITY_TOL};
use branchlab_core::{GridSpec, Magnetisation, Mode, StrayField};
use branchlab_elliptic::{divergence, pairwise_sum, AxisBc, FacetField, PoissonSolver, SliceGrid};
use branchlab_energy::level_sq_norm;

/// Neumann solver on a slice grid.
pub(crate) fn neumann_solver(sg: SliceGrid) -> Result<PoissonSolver> {
    Ok(PoissonSolver::new(sg, [AxisBc::Neumann; 2])?)
}

/// Solves `-Δu = rho` with outward flux `values` on the listed boundary
/// facets and zero flux elsewhere, and returns `u` with zero mean and the
/// facet field `-∇u`, whose boundary facets carry the flux.
///
/// The mean of the net source is projected out; callers check the balance
/// of their data beforehand.
pub(crate) fn solve_with_flux(
    solver: &PoissonSolver,
    rho: &[f64],
    facets: &[BoundaryFacet],
    values: &[f64],
) -> Result<(Vec<f64>, FacetField)> {
    let sg = *solver.grid();
    let b = flux_field(&sg, facets, values);
    let div_b = divergence(&sg, &b)?;
    let src: Vec<f64> = rho.iter().zip(&div_b).map(|(r, d)| r - d).collect();
    let u = solver.solve_projected(&src);
    let mut h = solver.gradient(&u)?;
    h.scale(-1.0);
    h.add_assign(&b);
    Ok((u, h))
}

/// Solution of the height-averaged problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OverRelaxed {
    /// Zero-mean potential `v₀`, one value per slice cell.
    pub potential: Vec<f64>,
    /// The field `h̄ = -∇'v₀` with the averaged flux `ḡ` on the boundary.
    pub field: FacetField,
    /// `E⁰ = ½ T_h ∫|h̄|²`, with `T_h` the field height of the box.
    pub energy: f64,
}

impl OverRelaxed {
    /// The height-constant stray field on every level of `grid`.
    pub fn stray_field(&self, grid: &GridSpec) -> Result<StrayField> {
        let mut h = StrayField::zeros(*grid);
        for k in 0..grid.levels() {
            h.set_level(k, &self.field)?;
        }
        Ok(h)
    }
}

/// Solves `-Δ'v₀ = -(m^T - m^B)/T_h` with flux `ḡ`.
pub fn solve_over_relaxed(bd: &BoundaryData) -> Result<OverRelaxed> {
    let g = *bd.grid();
    let sg = g.slice_grid();
    let solver = neumann_solver(sg)?;
    let th = g.field_height();
    let rho: Vec<f64> = bd
        .m_top()
        .iter()
        .zip(bd.m_bottom())
        .map(|(t, b)| -(t - b) / th)
        .collect();
    let facets = boundary_facets(&g);
    let (potential, field) = solve_with_flux(&solver, &rho, &facets, &bd.mean_flux())?;
    let energy = 0.5 * th * level_sq_norm(&g, [&field.comps[0], &field.comps[1]]);
    Ok(OverRelaxed {
        potential,
        field,
        energy,
    })
}

/// Generating fields `H^B = -∇'u^B` and `H^T = -∇'u^T` with
/// `-Δ'u^{B,T} = -m^{B,T}`.
///
/// Only the difference of the boundary fluxes is fixed by the data:
/// `(H^T - H^B)·ν = Σ_k Δz g_k`. `H^B` takes the uniform flux that
/// balances `-∫m^B`.
pub fn generating_fields(bd: &BoundaryData) -> Result<(FacetField, FacetField)> {
    let g = *bd.grid();
    let solver = neumann_solver(g.slice_grid())?;
    let facets = boundary_facets(&g);
    let measure: f64 = facets.iter().map(|b| b.measure).sum();
    let uniform = -g.cell_area() * pairwise_sum(bd.m_bottom()) / measure;
    let bottom_flux = vec![uniform; facets.len()];
    let top_flux: Vec<f64> = bd.cumulated_flux().iter().map(|c| uniform + c).collect();
    let neg = |m: &[f64]| m.iter().map(|v| -v).collect::<Vec<_>>();
    let (_, hb) = solve_with_flux(&solver, &neg(bd.m_bottom()), &facets, &bottom_flux)?;
    let (_, ht) = solve_with_flux(&solver, &neg(bd.m_top()), &facets, &top_flux)?;
    Ok((hb, ht))
}

/// Discrete linear interpolation between `m^B` and `m^T`:
/// `m₀_k = m^B + (k+1)/(n_v+1)·(m^T - m^B)`.
///
/// Together with the height-constant field `h̄` it satisfies the discrete
/// constraint on every level.
pub fn interpolated_magnetisation(bd: &BoundaryData) -> Result<Magnetisation> {
    let g = *bd.grid();
    let s = g.slice_cells();
    let steps = g.levels() as f64;
    let mut values = Vec::with_capacity(g.cells());
    for k in 0..g.n_v {
        let w = (k + 1) as f64 / steps;
        for c in 0..s {
            let (b, t) = (bd.m_bottom()[c], bd.m_top()[c]);
            values.push((b + w * (t - b)).clamp(-1.0, 1.0));
        }
    }
    Ok(Magnetisation::new(g, values, Mode::Relaxed)?)
}

/// Charge `-(m_k - m_{k-1})/Δz` of level `k` with the outer data of `bd`.
pub fn relaxed_charge(m: &Magnetisation, bd: &BoundaryData, k: usize) -> Vec<f64> {
    let g = *bd.grid();
    let upper = if k < g.n_v { m.slice(k) } else { bd.m_top() };
    let lower = if k > 0 { m.slice(k - 1) } else { bd.m_bottom() };
    upper
        .iter()
        .zip(lower)
        .map(|(u, l)| -(u - l) / g.dz())
        .collect()
}

/// The least-norm field admissible for `m` with the data of `bd`: on every
/// level `h_k = -∇'u_k` plus the prescribed flux.
///
/// Every level must balance: `∫ρ_k = ∫_{∂Q'} g_k`, which fixes the slice
/// means of `m`.
pub fn minimal_relaxed_field(m: &Magnetisation, bd: &BoundaryData) -> Result<StrayField> {
    let g = *bd.grid();
    g.ensure_same(m.grid())?;
    let solver = neumann_solver(g.slice_grid())?;
    let facets = boundary_facets(&g);
    let mut h = StrayField::zeros(g);
    for k in 0..g.levels() {
        let rho = relaxed_charge(m, bd, k);
        let outflow: Vec<f64> = facets
            .iter()
            .zip(bd.flux_level(k))
            .map(|(b, v)| b.measure * v)
            .collect();
        let (charge, flux) = (g.cell_area() * pairwise_sum(&rho), pairwise_sum(&outflow));
        let scale = g.cell_area() * rho.iter().map(|v| v.abs()).sum::<f64>()
            + outflow.iter().map(|v| v.abs()).sum::<f64>();
        if (charge - flux).abs() > COMPATIBILITY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(RelaxedError::Incompatible {
                flux,
                balance: charge,
            });
        }
        let (_, f) = solve_with_flux(&solver, &rho, &facets, bd.flux_level(k))?;
        h.set_level(k, &f)?;
    }
    Ok(h)
}

/// Largest violation of the relaxed constraint: cell residuals of
/// `(m_k - m_{k-1})/Δz + ∇'·h_k` and boundary mismatches `h·ν - g`.
pub fn relaxed_residual(m: &Magnetisation, h: &StrayField, bd: &BoundaryData) -> Result<f64> {
    let g = *bd.grid();
    g.ensure_same(m.grid())?;
    g.ensure_same(h.grid())?;
    let sg = g.slice_grid();
    let facets = boundary_facets(&g);
    let mut worst = 0.0_f64;
    for k in 0..g.levels() {
        let rho = relaxed_charge(m, bd, k);
        let div = divergence(&sg, &h.level_field(k))?;
        for (d, r) in div.iter().zip(&rho) {
            worst = worst.max((d - r).abs());
        }
        let level = h.level(k);
        for (bf, v) in facets.iter().zip(bd.flux_level(k)) {
            worst = worst.max((bf.sign() * level[bf.axis][bf.index] - v).abs());
        }
    }
    Ok(worst)
}
