//! Spectral inversion of the slice Laplacian.

use crate::sum::pairwise_sum;
use crate::transform::SliceTransform;
use crate::{gradient, AxisBc, EllipticError, FacetField, Result, SliceGrid};
use num_complex::Complex64;

/// Relative tolerance on the mean of a right-hand side.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

/// Solver for `-Δu = ρ` on one slice with zero-mean gauge.
///
/// The plan is immutable after construction and may be shared between
/// threads.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    grid: SliceGrid,
    bc: [AxisBc; 2],
    transform: SliceTransform,
    /// `1/(λ0+λ1)` per mode, zero for the constant mode.
    inv_eigen: Vec<f64>,
    /// `ΔA · w0 · w1 / (λ0+λ1)` per mode, zero for the constant mode.
    energy_symbol: Vec<f64>,
}

impl PoissonSolver {
    /// Plans a solver on `grid` with the given axis conditions.
    pub fn new(grid: SliceGrid, bc: [AxisBc; 2]) -> Result<Self> {
        grid.validate()?;
        let transform = SliceTransform::new(grid, bc);
        let [n0, n1] = grid.n;
        let axes = transform.axes();
        let mut inv_eigen = vec![0.0; n0 * n1];
        let mut energy_symbol = vec![0.0; n0 * n1];
        let area = grid.cell_area();
        for q1 in 0..n1 {
            for q0 in 0..n0 {
                if q0 == 0 && q1 == 0 {
                    continue;
                }
                let lam = axes[0].eigenvalue(q0) + axes[1].eigenvalue(q1);
                let k = q0 + n0 * q1;
                inv_eigen[k] = 1.0 / lam;
                energy_symbol[k] = area * axes[0].weight(q0) * axes[1].weight(q1) / lam;
            }
        }
        Ok(Self {
            grid,
            bc,
            transform,
            inv_eigen,
            energy_symbol,
        })
    }

    /// The slice grid.
    pub fn grid(&self) -> &SliceGrid {
        &self.grid
    }

    /// The axis conditions.
    pub fn bc(&self) -> [AxisBc; 2] {
        self.bc
    }

    /// The underlying separable transform.
    pub fn transform(&self) -> &SliceTransform {
        &self.transform
    }

    /// Per-mode weights turning squared coefficients into `∫|∇u|²`.
    pub fn energy_symbol(&self) -> &[f64] {
        &self.energy_symbol
    }

    fn check_len(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.grid.cells() {
            return Err(EllipticError::LengthMismatch {
                expected: self.grid.cells(),
                got: rho.len(),
            });
        }
        Ok(())
    }

    /// Mean of `rho` (pairwise summation).
    pub fn mean(&self, rho: &[f64]) -> f64 {
        pairwise_sum(rho) / rho.len() as f64
    }

    /// Fails unless `|mean(ρ)| ≤ 1e-12 · max|ρ|`.
    pub fn check_compatible(&self, rho: &[f64]) -> Result<()> {
        self.check_len(rho)?;
        let mean = self.mean(rho);
        let sup = rho.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let tolerance = COMPATIBILITY_TOL * sup;
        if mean.abs() > tolerance || !mean.is_finite() {
            return Err(EllipticError::Incompatible { mean, tolerance });
        }
        Ok(())
    }

    /// Transform coefficients of `rho`, without any compatibility check.
    pub fn spectrum(&self, rho: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(rho)?;
        Ok(self.transform.forward(rho))
    }

    /// `∫|∇u|²` for the potential whose right-hand side has coefficients
    /// `spec`; the constant mode is ignored.
    pub fn energy_of_spectrum(&self, spec: &[Complex64]) -> f64 {
        let terms: Vec<f64> = spec
            .iter()
            .zip(&self.energy_symbol)
            .map(|(c, s)| s * c.norm_sqr())
            .collect();
        pairwise_sum(&terms)
    }

    /// `‖|∇|⁻¹ρ‖² = ∫|∇u|²` with `-Δu = ρ`, computed from the spectrum.
    pub fn inv_grad_sq_norm(&self, rho: &[f64]) -> Result<f64> {
        self.check_compatible(rho)?;
        Ok(self.energy_of_spectrum(&self.transform.forward(rho)))
    }

    /// Zero-mean solution of `-Δu = ρ`.
    pub fn solve(&self, rho: &[f64]) -> Result<Vec<f64>> {
        self.check_compatible(rho)?;
        Ok(self.solve_projected(rho))
    }

    /// Zero-mean solution of `-Δu = ρ - mean(ρ)`; never fails on length-
    /// matched input.
    pub fn solve_projected(&self, rho: &[f64]) -> Vec<f64> {
        assert_eq!(rho.len(), self.grid.cells(), "right-hand side length");
        let mut spec = self.transform.forward(rho);
        for (c, s) in spec.iter_mut().zip(&self.inv_eigen) {
            *c *= *s;
        }
        self.transform.inverse(&spec)
    }

    /// `∇u` on facets for a potential `u` on this grid.
    pub fn gradient(&self, u: &[f64]) -> Result<FacetField> {
        gradient(&self.grid, self.bc, u)
    }

    /// `∫|F|²` of a facet field, with half weight on lateral end facets.
    ///
    /// On a periodic axis the two end facets carry the same value, so the
    /// two halves add up to one full facet; on a Neumann axis they vanish
    /// for gradients.
    pub fn facet_sq_norm(&self, field: &FacetField) -> f64 {
        facet_sq_norm(&self.grid, field)
    }
}

/// `∫|F|²` of a facet field with half weight on the lateral end facets.
pub fn facet_sq_norm(grid: &SliceGrid, field: &FacetField) -> f64 {
    let [n0, n1] = grid.n;
    let area = grid.cell_area();
    let mut terms = Vec::with_capacity(grid.facets(0) + grid.facets(1));
    for i1 in 0..n1 {
        for f0 in 0..=n0 {
            let w = if f0 == 0 || f0 == n0 { 0.5 } else { 1.0 };
            terms.push(w * field.comps[0][grid.facet0(f0, i1)].powi(2));
        }
    }
    if grid.dims == 2 {
        for f1 in 0..=n1 {
            let w = if f1 == 0 || f1 == n1 { 0.5 } else { 1.0 };
            for i0 in 0..n0 {
                terms.push(w * field.comps[1][grid.facet1(i0, f1)].powi(2));
            }
        }
    }
    area * pairwise_sum(&terms)
}
