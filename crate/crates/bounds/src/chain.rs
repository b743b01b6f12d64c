//! Ansatz-free lower bound by slice-wise Young, interpolation and
//! Poincaré inequalities.
//!
//! For an admissible pair with zero slice means, Poincaré's inequality in
//! the vertical variable gives `∫|h|² ≥ T⁻² ∫‖|∇'|⁻¹m_s‖² dz`. With
//! `a^{2/3}b^{1/3} ≤ ⅔a + ⅓b` on every slice,
//!
//! `Σ_s Δz (σ‖∇'m_s‖₁)^{2/3} (T⁻²‖|∇'|⁻¹m_s‖²)^{1/3} ≤ ⅔ E(m, h)`.
//!
//! The discrete Poincaré constant of `n_v` slices with zero data above and
//! below is `(4/Δz²) sin²(π/(2(n_v+1))) ≥ 1/T²`, so the bound holds on the
//! grid exactly. Zero-flux sides use the cosine solver; this equals the
//! periodic value of the `d`-fold even reflection divided by `2^d`, and so
//! does the energy.

use crate::interpolation::slice_norms;
use crate::{BoundsError, Result};
use branchlab_core::{check_admissibility, Magnetisation, StrayField};
use branchlab_elliptic::pairwise_sum;
use rayon::prelude::*;

/// Constant of the Young step: `chain ≤ YOUNG_CONSTANT · E`.
pub const YOUNG_CONSTANT: f64 = 2.0 / 3.0;

/// Tolerance of the admissibility check applied to the input pair.
pub const CHAIN_ADMISSIBILITY_TOL: f64 = 1e-8;

/// Value of the chain and the interpolation data behind its last step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBound {
    /// `Σ_s Δz (σ‖∇'m_s‖₁)^{2/3} (T⁻²‖|∇'|⁻¹m_s‖²)^{1/3}`.
    pub value: f64,
    /// `σ^{2/3} T^{-2/3} Σ_s Δz ‖m_s‖_{4/3}^{4/3}`, which equals
    /// `σ^{2/3}(2L)^d T^{1/3}` for `|m| = 1`.
    pub floor: f64,
    /// Largest interpolation ratio over the slices; the chain satisfies
    /// `value ≥ floor / max_ratio^{4/3}`.
    pub max_ratio: f64,
}

/// The lower-bound chain of an admissible pair (`h` is used only for the
/// admissibility check; the chain depends on `m` alone).
pub fn lower_bound_chain(m: &Magnetisation, h: &StrayField, sigma: f64) -> Result<ChainBound> {
    let rep = check_admissibility(m, h, CHAIN_ADMISSIBILITY_TOL)?;
    if !rep.passed {
        return Err(BoundsError::Inadmissible(format!(
            "residual {:e}",
            rep.max_residual
        )));
    }
    chain_of(m, sigma)
}

/// The chain of `m`, which must have zero slice means (no field needed).
pub fn chain_of(m: &Magnetisation, sigma: f64) -> Result<ChainBound> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(BoundsError::Invalid(format!("sigma = {sigma}")));
    }
    let g = *m.grid();
    let t = g.height;
    let norms = (0..g.n_v)
        .into_par_iter()
        .map(|s| slice_norms(&g, m.slice(s)))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<f64> = norms
        .iter()
        .map(|n| (sigma * n.variation).powf(2.0 / 3.0) * (n.inv_grad_sq / (t * t)).cbrt())
        .collect();
    let floor_terms: Vec<f64> = norms.iter().map(|n| n.l43_pow).collect();
    Ok(ChainBound {
        value: g.dz() * pairwise_sum(&terms),
        floor: sigma.powf(2.0 / 3.0) * t.powf(-2.0 / 3.0) * g.dz() * pairwise_sum(&floor_terms),
        max_ratio: norms.iter().map(|n| n.ratio()).fold(0.0, f64::max),
    })
}
