//! Minimal stray field and field energies.
//!
//! On every level the admissible field of least `L²` norm is
//! `h_k = -∇'u_k` with `-Δ'u_k = ρ_k`, where `ρ_k = -(m_k - m_{k-1})/Δz`
//! is the vertical charge. Levels decouple, so the field energy
//! `½ Σ_k w_k Δz ∫|h_k|²` is also available directly from the spectra of
//! the charges without ever storing the field.

use crate::{EnergyError, Result};
use branchlab_core::{restrict_field, CellBox, GridSpec, Magnetisation, StrayField};
use branchlab_elliptic::{pairwise_sum, FacetField, PoissonSolver};
use rayon::prelude::*;

/// Slice solver matching the lateral conditions of `grid`.
pub fn level_solver(grid: &GridSpec) -> Result<PoissonSolver> {
    Ok(PoissonSolver::new(grid.slice_grid(), grid.solver_bc()?)?)
}

fn level_potential(m: &Magnetisation, solver: &PoissonSolver, k: usize) -> Result<Vec<f64>> {
    let rho = m.charge_level(k)?;
    solver
        .solve(&rho)
        .map_err(|source| EnergyError::Inadmissible { level: k, source })
}

/// The admissible stray field of least energy for `m`.
///
/// Fails if a slice of `m` has non-zero mean (no admissible field exists),
/// if a lateral axis is free, or if a horizontal face is cut.
pub fn minimal_stray_field(m: &Magnetisation) -> Result<StrayField> {
    minimal_stray_field_in(m, &CellBox::full(m.grid()))
}

/// The minimal stray field of `m`, restricted to the box `cb`.
///
/// Only the levels bounding the box are solved.
pub fn minimal_stray_field_in(m: &Magnetisation, cb: &CellBox) -> Result<StrayField> {
    let g = *m.grid();
    cb.check(&g)?;
    let solver = level_solver(&g)?;
    let levels: Vec<FacetField> = (cb.k_lo..=cb.k_hi)
        .into_par_iter()
        .map(|k| {
            let u = level_potential(m, &solver, k)?;
            let mut f = solver.gradient(&u)?;
            f.scale(-1.0);
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let column = CellBox {
        lo: [0, 0],
        hi: g.n,
        k_lo: cb.k_lo,
        k_hi: cb.k_hi,
    };
    let cg = column.sub_grid(&g)?;
    let mut h = StrayField::zeros(cg);
    for (j, f) in levels.iter().enumerate() {
        h.set_level(j, f)?;
    }
    if cb.lo == [0, 0] && cb.hi == g.n {
        return Ok(h);
    }
    let inner = CellBox {
        lo: cb.lo,
        hi: cb.hi,
        k_lo: 0,
        k_hi: cb.slices(),
    };
    Ok(restrict_field(&h, &inner)?)
}

/// Per-level energies `½ w_k Δz ∫|h_k|²` of the minimal field, computed
/// spectrally.
pub fn minimal_level_energies(m: &Magnetisation) -> Result<Vec<f64>> {
    let g = *m.grid();
    let solver = level_solver(&g)?;
    let dz = g.dz();
    (0..g.levels())
        .into_par_iter()
        .map(|k| {
            let rho = m.charge_level(k)?;
            solver
                .check_compatible(&rho)
                .map_err(|source| EnergyError::Inadmissible { level: k, source })?;
            let spec = solver.spectrum(&rho)?;
            Ok(0.5 * g.level_weight(k) * dz * solver.energy_of_spectrum(&spec))
        })
        .collect()
}

/// Energy `½ ∫|h|²` of the minimal stray field of `m`.
pub fn minimal_stray_energy(m: &Magnetisation) -> Result<f64> {
    Ok(pairwise_sum(&minimal_level_energies(m)?))
}

/// `∫|F|²` over one level with half weight on the lateral end facets.
pub fn level_sq_norm(grid: &GridSpec, level: [&[f64]; 2]) -> f64 {
    let sg = grid.slice_grid();
    let [n0, n1] = grid.n;
    let mut acc = Vec::with_capacity(n1 + n0);
    for i1 in 0..n1 {
        let mut row = 0.0;
        for f0 in 0..=n0 {
            row += grid.facet_weight(0, f0) * level[0][sg.facet0(f0, i1)].powi(2);
        }
        acc.push(row);
    }
    if grid.d == 2 {
        for f1 in 0..=n1 {
            let w = grid.facet_weight(1, f1);
            let mut row = 0.0;
            for i0 in 0..n0 {
                row += level[1][sg.facet1(i0, f1)].powi(2);
            }
            acc.push(w * row);
        }
    }
    grid.cell_area() * pairwise_sum(&acc)
}

/// Per-level energies `½ w_k Δz ∫|h_k|²` of a given field.
pub fn level_energies(h: &StrayField) -> Vec<f64> {
    let g = *h.grid();
    (0..g.levels())
        .into_par_iter()
        .map(|k| 0.5 * g.level_weight(k) * g.dz() * level_sq_norm(&g, h.level(k)))
        .collect()
}

/// Field energy `½ ∫|h|²` with the level and facet weights of `h`'s grid.
pub fn field_energy(h: &StrayField) -> f64 {
    pairwise_sum(&level_energies(h))
}

/// Largest discrete curl `∂₀h₁ - ∂₁h₀` over interior vertices (0 for
/// `d = 1`).
pub fn discrete_curl_max(h: &StrayField) -> f64 {
    let g = *h.grid();
    if g.d == 1 {
        return 0.0;
    }
    let sg = g.slice_grid();
    let [n0, n1] = g.n;
    let (dx0, dx1) = (g.dx(0), g.dx(1));
    let mut worst = 0.0_f64;
    for k in 0..g.levels() {
        let [c0, c1] = h.level(k);
        for v1 in 1..n1 {
            for v0 in 1..n0 {
                let d0 = (c1[sg.facet1(v0, v1)] - c1[sg.facet1(v0 - 1, v1)]) / dx0;
                let d1 = (c0[sg.facet0(v0, v1)] - c0[sg.facet0(v0, v1 - 1)]) / dx1;
                worst = worst.max((d0 - d1).abs());
            }
        }
    }
    worst
}
