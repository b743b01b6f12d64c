//! Discrete divergence constraint `∂_z m + ∇'·h = 0`.

use crate::field::{Magnetisation, StrayField};
use crate::grid::{LateralBc, VerticalFace};
use crate::Result;
use branchlab_elliptic::divergence_parts;

/// Outcome of [`check_admissibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Largest per-cell residual of `(m_k - m_{k-1})/Δz + ∇'·h_k`, together
    /// with lateral boundary violations (non-zero flux on zero-flux sides,
    /// unequal end values on periodic sides).
    pub max_residual: f64,
    /// Mean of every slice, bottom first.
    pub slice_means: Vec<f64>,
    /// Largest absolute mean of the bottom and top slices.
    pub top_bottom_weak_norm: f64,
    /// True if the residual and, where required, the slice means are
    /// within tolerance.
    pub passed: bool,
}

/// Checks the discrete constraint on every level whose charge is known.
///
/// Levels on cut faces involve cells outside the box and are skipped. Zero
/// slice means are required when the sides carry no net flux and at least
/// one horizontal face is closed.
pub fn check_admissibility(
    m: &Magnetisation,
    h: &StrayField,
    tol: f64,
) -> Result<AdmissibilityReport> {
    let g = *m.grid();
    g.ensure_same(h.grid())?;
    let sg = g.slice_grid();
    let mut charge = vec![0.0; g.slice_cells()];
    let mut max_residual = 0.0_f64;
    for k in 0..g.levels() {
        let on_cut =
            (k == 0 && g.bottom == VerticalFace::Cut) || (k == g.n_v && g.top == VerticalFace::Cut);
        if on_cut {
            continue;
        }
        m.charge_level_into(k, &mut charge)?;
        let [c0, c1] = h.level(k);
        let div = divergence_parts(&sg, c0, c1).expect("level arrays match the slice grid");
        for (d, r) in div.iter().zip(&charge) {
            max_residual = max_residual.max((d - r).abs());
        }
        max_residual = max_residual.max(lateral_violation(&g, [c0, c1]));
    }
    let slice_means = m.slice_means();
    let top_bottom_weak_norm = slice_means[0].abs().max(slice_means[g.n_v - 1].abs());
    let needs_zero_mean = !g.bc.contains(&LateralBc::Free)
        && (g.bottom == VerticalFace::Closed || g.top == VerticalFace::Closed);
    let means_ok = !needs_zero_mean || slice_means.iter().all(|v| v.abs() <= tol);
    let passed = max_residual <= tol && means_ok;
    Ok(AdmissibilityReport {
        max_residual,
        slice_means,
        top_bottom_weak_norm,
        passed,
    })
}

fn lateral_violation(g: &crate::GridSpec, level: [&[f64]; 2]) -> f64 {
    let sg = g.slice_grid();
    let [n0, n1] = g.n;
    let mut worst = 0.0_f64;
    for a in 0..g.d {
        let rows = if a == 0 { n1 } else { n0 };
        for r in 0..rows {
            let (first, last) = if a == 0 {
                (level[0][sg.facet0(0, r)], level[0][sg.facet0(n0, r)])
            } else {
                (level[1][sg.facet1(r, 0)], level[1][sg.facet1(r, n1)])
            };
            let v = match g.bc[a] {
                LateralBc::ZeroFlux => first.abs().max(last.abs()),
                LateralBc::Periodic => (first - last).abs(),
                LateralBc::Free => 0.0,
            };
            worst = worst.max(v);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GridSpec, Mode};

    #[test]
    fn zero_fields_pass() {
        let g = GridSpec::new(2, 4, 3, 1.0, 1.0, LateralBc::Periodic).unwrap();
        let r =
            check_admissibility(&Magnetisation::zeros(g), &StrayField::zeros(g), 1e-12).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn nonzero_slice_mean_fails() {
        let g = GridSpec::new(1, 4, 2, 1.0, 1.0, LateralBc::Periodic).unwrap();
        let m = Magnetisation::from_fn(g, Mode::Sharp, |i, _, _| if i == 0 { -1.0 } else { 1.0 })
            .unwrap();
        let r = check_admissibility(&m, &StrayField::zeros(g), 1e-10).unwrap();
        assert!(!r.passed);
        assert_eq!(r.slice_means, vec![0.5, 0.5]);
        assert_eq!(r.top_bottom_weak_norm, 0.5);
    }
}
