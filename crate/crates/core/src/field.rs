//! Magnetisation and stray-field storage.

use crate::grid::{GridSpec, VerticalFace};
use crate::{CoreError, Result};
use branchlab_elliptic::{pairwise_sum, FacetField};

/// Value constraint of a magnetisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every value is exactly `+1` or `-1`.
    Sharp,
    /// Every value lies in `[-1, 1]`.
    Relaxed,
}

impl Mode {
    /// Canonical lower-case name.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sharp => "sharp",
            Mode::Relaxed => "relaxed",
        }
    }

    /// Parses [`Mode::name`].
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sharp" => Some(Mode::Sharp),
            "relaxed" => Some(Mode::Relaxed),
            _ => None,
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            Mode::Sharp => v == 1.0 || v == -1.0,
            Mode::Relaxed => (-1.0..=1.0).contains(&v),
        }
    }
}

/// Cell-centred scalar magnetisation, slice-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Magnetisation {
    grid: GridSpec,
    values: Vec<f64>,
    mode: Mode,
}

impl Magnetisation {
    /// Wraps `values` after checking length and mode constraints.
    pub fn new(grid: GridSpec, values: Vec<f64>, mode: Mode) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.cells() {
            return Err(CoreError::LengthMismatch {
                expected: grid.cells(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !mode.admits(**v)) {
            return Err(CoreError::ValueOutOfRange {
                index,
                value,
                mode: mode.name(),
            });
        }
        Ok(Self { grid, values, mode })
    }

    /// Builds values from a function of `(i0, i1, k)`.
    pub fn from_fn<F: FnMut(usize, usize, usize) -> f64>(
        grid: GridSpec,
        mode: Mode,
        mut f: F,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.cells());
        for k in 0..grid.n_v {
            for i1 in 0..grid.n[1] {
                for i0 in 0..grid.n[0] {
                    values.push(f(i0, i1, k));
                }
            }
        }
        Self::new(grid, values, mode)
    }

    /// The zero (relaxed) magnetisation.
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.cells()],
            mode: Mode::Relaxed,
        }
    }

    /// The grid.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// All values, slice-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes the field, returning its values.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The value constraint.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// True if every value is `±1`, whatever the declared mode.
    pub fn is_sharp_valued(&self) -> bool {
        self.values.iter().all(|v| Mode::Sharp.admits(*v))
    }

    /// Same values with relaxed constraint.
    pub fn relaxed(mut self) -> Self {
        self.mode = Mode::Relaxed;
        self
    }

    /// Value at cell `(i0, i1, k)`.
    #[inline]
    pub fn get(&self, i0: usize, i1: usize, k: usize) -> f64 {
        self.values[self.grid.idx(i0, i1, k)]
    }

    /// Values of slice `k`.
    pub fn slice(&self, k: usize) -> &[f64] {
        let s = self.grid.slice_cells();
        &self.values[k * s..(k + 1) * s]
    }

    /// Mean of slice `k` (pairwise summation).
    pub fn slice_mean(&self, k: usize) -> f64 {
        pairwise_sum(self.slice(k)) / self.grid.slice_cells() as f64
    }

    /// Means of all slices, bottom first.
    pub fn slice_means(&self) -> Vec<f64> {
        (0..self.grid.n_v).map(|k| self.slice_mean(k)).collect()
    }

    /// Vertical charge on level `k`: `-(m_k - m_{k-1}) / Δz`, with zero
    /// magnetisation beyond closed faces.
    ///
    /// Levels on cut faces depend on cells outside the box and are
    /// reported as an error.
    pub fn charge_level(&self, k: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.grid.slice_cells()];
        self.charge_level_into(k, &mut out)?;
        Ok(out)
    }

    /// [`Magnetisation::charge_level`] into a caller-provided buffer.
    pub fn charge_level_into(&self, k: usize, out: &mut [f64]) -> Result<()> {
        let g = &self.grid;
        if k > g.n_v {
            return Err(CoreError::InvalidGrid(format!(
                "level {k} beyond {}",
                g.n_v
            )));
        }
        let on_cut =
            (k == 0 && g.bottom == VerticalFace::Cut) || (k == g.n_v && g.top == VerticalFace::Cut);
        if on_cut {
            return Err(CoreError::BoundaryCondition(format!(
                "level {k} lies on a cut face; its charge depends on cells outside the box"
            )));
        }
        let inv = 1.0 / g.dz();
        let s = g.slice_cells();
        let upper = (k < g.n_v).then(|| self.slice(k));
        let lower = (k > 0).then(|| self.slice(k - 1));
        for c in 0..s {
            let a = upper.map_or(0.0, |u| u[c]);
            let b = lower.map_or(0.0, |l| l[c]);
            out[c] = -(a - b) * inv;
        }
        Ok(())
    }
}

/// Horizontal stray field on the field levels.
///
/// `comps[a]` stores, level after level, the axis-`a` component on the
/// facets normal to axis `a` in the layout of
/// [`branchlab_elliptic::SliceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrayField {
    grid: GridSpec,
    comps: [Vec<f64>; 2],
}

impl StrayField {
    /// The zero field.
    pub fn zeros(grid: GridSpec) -> Self {
        let l = grid.levels();
        Self {
            grid,
            comps: [vec![0.0; l * grid.facets(0)], vec![0.0; l * grid.facets(1)]],
        }
    }

    /// Wraps raw component arrays.
    pub fn from_parts(grid: GridSpec, comps: [Vec<f64>; 2]) -> Result<Self> {
        grid.validate()?;
        for (a, c) in comps.iter().enumerate() {
            let expected = grid.levels() * grid.facets(a);
            if c.len() != expected {
                return Err(CoreError::LengthMismatch {
                    expected,
                    got: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::InvalidGrid(
                    "non-finite stray-field value".into(),
                ));
            }
        }
        Ok(Self { grid, comps })
    }

    /// The grid.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Raw component arrays.
    pub fn comps(&self) -> &[Vec<f64>; 2] {
        &self.comps
    }

    /// Consumes the field, returning its component arrays.
    pub fn into_parts(self) -> [Vec<f64>; 2] {
        self.comps
    }

    /// Borrowed components of level `k`.
    pub fn level(&self, k: usize) -> [&[f64]; 2] {
        let f0 = self.grid.facets(0);
        let f1 = self.grid.facets(1);
        [
            &self.comps[0][k * f0..(k + 1) * f0],
            &self.comps[1][k * f1..(k + 1) * f1],
        ]
    }

    /// Mutable components of level `k`.
    pub fn level_mut(&mut self, k: usize) -> [&mut [f64]; 2] {
        let f0 = self.grid.facets(0);
        let f1 = self.grid.facets(1);
        let [c0, c1] = &mut self.comps;
        [&mut c0[k * f0..(k + 1) * f0], &mut c1[k * f1..(k + 1) * f1]]
    }

    /// Level `k` as an owned facet field.
    pub fn level_field(&self, k: usize) -> FacetField {
        let [a, b] = self.level(k);
        FacetField {
            comps: [a.to_vec(), b.to_vec()],
        }
    }

    /// Overwrites level `k`.
    pub fn set_level(&mut self, k: usize, field: &FacetField) -> Result<()> {
        let [a, b] = self.level_mut(k);
        if field.comps[0].len() != a.len() || field.comps[1].len() != b.len() {
            return Err(CoreError::LengthMismatch {
                expected: a.len() + b.len(),
                got: field.comps[0].len() + field.comps[1].len(),
            });
        }
        a.copy_from_slice(&field.comps[0]);
        b.copy_from_slice(&field.comps[1]);
        Ok(())
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Component-wise `self + other`.
    pub fn add(&self, other: &StrayField) -> Result<StrayField> {
        self.grid.ensure_same(&other.grid)?;
        let comps = [0, 1].map(|a| {
            self.comps[a]
                .iter()
                .zip(&other.comps[a])
                .map(|(x, y)| x + y)
                .collect()
        });
        Ok(StrayField {
            grid: self.grid,
            comps,
        })
    }

    /// Scales every component by `s`.
    pub fn scaled(&self, s: f64) -> StrayField {
        let comps = [0, 1].map(|a| self.comps[a].iter().map(|x| x * s).collect());
        StrayField {
            grid: self.grid,
            comps,
        }
    }

    /// Same values on a different grid with identical array shapes.
    pub(crate) fn relabel(self, grid: GridSpec) -> StrayField {
        debug_assert_eq!(grid.levels() * grid.facets(0), self.comps[0].len());
        StrayField {
            grid,
            comps: self.comps,
        }
    }
}

impl Magnetisation {
    /// Same values on a different grid with identical cell counts.
    pub(crate) fn relabel(self, grid: GridSpec) -> Magnetisation {
        debug_assert_eq!(grid.cells(), self.values.len());
        Magnetisation {
            grid,
            values: self.values,
            mode: self.mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LateralBc;

    #[test]
    fn sharp_mode_rejects_intermediate_values() {
        let g = GridSpec::new(1, 2, 1, 1.0, 1.0, LateralBc::Periodic).unwrap();
        assert!(Magnetisation::new(g, vec![1.0, 0.5], Mode::Sharp).is_err());
        assert!(Magnetisation::new(g, vec![1.0, 0.5], Mode::Relaxed).is_ok());
        assert!(Magnetisation::new(g, vec![1.0, 1.5], Mode::Relaxed).is_err());
        assert!(Magnetisation::new(g, vec![1.0], Mode::Relaxed).is_err());
    }

    #[test]
    fn charges_include_boundary_sheets() {
        let g = GridSpec::new(1, 2, 2, 1.0, 1.0, LateralBc::Periodic).unwrap();
        let m = Magnetisation::new(g, vec![1.0, -1.0, -1.0, 1.0], Mode::Sharp).unwrap();
        assert_eq!(m.charge_level(0).unwrap(), vec![-2.0, 2.0]);
        assert_eq!(m.charge_level(1).unwrap(), vec![4.0, -4.0]);
        assert_eq!(m.charge_level(2).unwrap(), vec![-2.0, 2.0]);
        assert_eq!(m.slice_means(), vec![0.0, 0.0]);
    }
}
