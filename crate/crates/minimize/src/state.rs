//! Cached energy of a sharp admissible configuration with exact
//! incremental updates.
//!
//! The state keeps the transform coefficients of every charge level and the
//! total variation of every slice. Changing cell `c` of slice `s` by `δ`
//! changes the charge of level `s` by `-δ/Δz` and of level `s + 1` by
//! `+δ/Δz` at `c`, so a move touches only the levels next to its slices.
//! With `ρ̂` the cached coefficients and `Δρ̂` those of the change, the
//! field energy of a level moves by `½ w Δz Σ_j s_j (2 Re(ρ̂_j* Δρ̂_j) + |Δρ̂_j|²)`
//! with the energy symbol `s`. The interfacial part changes only on the
//! lateral facets next to changed cells.

use crate::{MinimizeError, Result};
use branchlab_core::{GridSpec, LateralBc, Magnetisation, Mode};
use branchlab_elliptic::{pairwise_sum, PoissonSolver};
use branchlab_energy::level_solver;
use num_complex::Complex64;

/// Energy bookkeeping of one configuration.
#[derive(Debug, Clone)]
pub struct EnergyState {
    grid: GridSpec,
    sigma: f64,
    values: Vec<f64>,
    solver: PoissonSolver,
    spectra: Vec<Vec<Complex64>>,
    level_energy: Vec<f64>,
    slice_tv: Vec<f64>,
}

/// A proposed change with its exact energy difference.
#[derive(Debug, Clone, PartialEq)]
pub struct Move {
    /// Changed cells and their new values, sorted by cell.
    pub changes: Vec<(usize, f64)>,
    /// Energy difference `E(after) - E(before)`.
    pub delta: f64,
    slice_tv: Vec<(usize, f64)>,
    levels: Vec<(usize, Vec<Complex64>, f64)>,
}

impl EnergyState {
    /// Builds the caches of a sharp configuration whose every slice has
    /// zero mean.
    pub fn new(m: &Magnetisation, sigma: f64) -> Result<Self> {
        let g = *m.grid();
        if !m.is_sharp_valued() {
            return Err(MinimizeError::Inadmissible("values must be ±1".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(MinimizeError::InvalidConfig(format!(
                "σ = {sigma} must be positive"
            )));
        }
        let solver = level_solver(&g)?;
        let mut spectra = Vec::with_capacity(g.levels());
        let mut level_energy = Vec::with_capacity(g.levels());
        for k in 0..g.levels() {
            let rho = m.charge_level(k)?;
            solver
                .check_compatible(&rho)
                .map_err(|e| MinimizeError::Inadmissible(format!("level {k}: {e}")))?;
            let spec = solver.spectrum(&rho)?;
            level_energy.push(level_factor(&g, k) * solver.energy_of_spectrum(&spec));
            spectra.push(spec);
        }
        let slice_tv = (0..g.n_v)
            .map(|s| slice_variation(&g, m.slice(s)))
            .collect();
        Ok(Self {
            grid: g,
            sigma,
            values: m.values().to_vec(),
            solver,
            spectra,
            level_energy,
            slice_tv,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Current cell values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Current configuration.
    pub fn magnetisation(&self) -> Magnetisation {
        Magnetisation::new(self.grid, self.values.clone(), Mode::Sharp)
            .expect("cached values match the grid")
    }

    /// Interfacial energy `∫|∇'m|`.
    pub fn interfacial(&self) -> f64 {
        pairwise_sum(&self.slice_tv) * self.grid.dz()
    }

    /// Field energy `½∫|h|²` of the minimal stray field.
    pub fn stray(&self) -> f64 {
        pairwise_sum(&self.level_energy)
    }

    /// Total energy `σ ∫|∇'m| + ½∫|h|²`.
    pub fn energy(&self) -> f64 {
        self.sigma * self.interfacial() + self.stray()
    }

    /// Energy change of setting the listed cells to the listed values.
    ///
    /// Fails if a cell is out of range, a value is not `±1`, or a slice sum
    /// changes (the stray energy would be infinite).
    pub fn propose(&self, changes: &[(usize, f64)]) -> Result<Move> {
        let g = &self.grid;
        let sc = g.slice_cells();
        let mut changes: Vec<(usize, f64)> = changes.to_vec();
        changes.sort_by_key(|c| c.0);
        changes.dedup_by_key(|c| c.0);
        for &(c, v) in &changes {
            if c >= g.cells() {
                return Err(MinimizeError::CellOutOfRange {
                    cell: c,
                    cells: g.cells(),
                });
            }
            if v != 1.0 && v != -1.0 {
                return Err(MinimizeError::Inadmissible(format!("value {v} is not ±1")));
            }
        }
        changes.retain(|&(c, v)| self.values[c] != v);
        let mut slices: Vec<usize> = changes.iter().map(|c| c.0 / sc).collect();
        slices.dedup();
        for &s in &slices {
            let shift: f64 = changes
                .iter()
                .filter(|c| c.0 / sc == s)
                .map(|&(c, v)| v - self.values[c])
                .sum();
            if shift != 0.0 {
                return Err(MinimizeError::Inadmissible(format!(
                    "the change moves the mean of slice {s}"
                )));
            }
        }
        let value = |c: usize| match changes.binary_search_by_key(&c, |x| x.0) {
            Ok(i) => changes[i].1,
            Err(_) => self.values[c],
        };
        let mut d_tv = 0.0;
        let mut slice_tv = Vec::with_capacity(slices.len());
        for &s in &slices {
            let touched: Vec<usize> = changes
                .iter()
                .filter(|c| c.0 / sc == s)
                .map(|c| c.0 % sc)
                .collect();
            let before = local_variation(g, &touched, |i| self.values[s * sc + i]);
            let after = local_variation(g, &touched, |i| value(s * sc + i));
            d_tv += after - before;
            slice_tv.push((s, self.slice_tv[s] + after - before));
        }
        let mut levels: Vec<usize> = slices.iter().flat_map(|&s| [s, s + 1]).collect();
        levels.dedup();
        let inv = 1.0 / g.dz();
        let symbol = self.solver.energy_symbol();
        let mut d_field = 0.0;
        let mut updates = Vec::with_capacity(levels.len());
        for &k in &levels {
            let mut drho = vec![0.0; sc];
            for &(c, v) in &changes {
                let (s, i) = (c / sc, c % sc);
                let dv = v - self.values[c];
                if s == k {
                    drho[i] -= dv * inv;
                } else if s + 1 == k {
                    drho[i] += dv * inv;
                }
            }
            let dspec = self.solver.spectrum(&drho)?;
            let terms: Vec<f64> = self.spectra[k]
                .iter()
                .zip(&dspec)
                .zip(symbol)
                .map(|((r, d), s)| s * (2.0 * (r.conj() * d).re + d.norm_sqr()))
                .collect();
            let de = level_factor(g, k) * pairwise_sum(&terms);
            d_field += de;
            let spec: Vec<Complex64> = self.spectra[k]
                .iter()
                .zip(&dspec)
                .map(|(r, d)| r + d)
                .collect();
            updates.push((k, spec, self.level_energy[k] + de));
        }
        Ok(Move {
            delta: self.sigma * g.dz() * d_tv + d_field,
            changes,
            slice_tv,
            levels: updates,
        })
    }

    /// Energy change of flipping one cell. A single flip of a `±1` cell
    /// always moves its slice mean, so the move is rejected as
    /// inadmissible; use [`EnergyState::pair_delta`] instead.
    pub fn flip_delta(&self, cell: usize) -> Result<Move> {
        self.check_cell(cell)?;
        self.propose(&[(cell, -self.values[cell])])
    }

    /// Energy change of flipping two cells of opposite sign in one slice.
    pub fn pair_delta(&self, a: usize, b: usize) -> Result<Move> {
        self.check_cell(a)?;
        self.check_cell(b)?;
        self.propose(&[(a, -self.values[a]), (b, -self.values[b])])
    }

    /// Energy change of exchanging two vertical columns given by their
    /// in-slice indices.
    pub fn column_swap_delta(&self, a: usize, b: usize) -> Result<Move> {
        let sc = self.grid.slice_cells();
        for c in [a, b] {
            if c >= sc {
                return Err(MinimizeError::CellOutOfRange { cell: c, cells: sc });
            }
        }
        let mut changes = Vec::with_capacity(2 * self.grid.n_v);
        for s in 0..self.grid.n_v {
            let (ia, ib) = (s * sc + a, s * sc + b);
            changes.push((ia, self.values[ib]));
            changes.push((ib, self.values[ia]));
        }
        self.propose(&changes)
    }

    /// Applies a move proposed on the current state.
    pub fn apply(&mut self, mv: Move) {
        for (c, v) in mv.changes {
            self.values[c] = v;
        }
        for (s, tv) in mv.slice_tv {
            self.slice_tv[s] = tv;
        }
        for (k, spec, e) in mv.levels {
            self.spectra[k] = spec;
            self.level_energy[k] = e;
        }
    }

    fn check_cell(&self, cell: usize) -> Result<()> {
        if cell >= self.grid.cells() {
            return Err(MinimizeError::CellOutOfRange {
                cell,
                cells: self.grid.cells(),
            });
        }
        Ok(())
    }
}

/// `½ w_k Δz`.
fn level_factor(g: &GridSpec, k: usize) -> f64 {
    0.5 * g.level_weight(k) * g.dz()
}

/// Lateral facets of one slice, each identified by `(axis, line, f)` with
/// `f ∈ 1..n` between cells `f - 1` and `f`, and `f = 0` for the periodic
/// wrap-around facet.
fn cell_facets(g: &GridSpec, i: usize, out: &mut Vec<(usize, usize, usize)>) {
    let n0 = g.n[0];
    let pos = [i % n0, i / n0];
    for a in 0..g.d {
        let n = g.n[a];
        let line = pos[1 - a];
        let p = pos[a];
        let periodic = g.bc[a] == LateralBc::Periodic;
        if p > 0 {
            out.push((a, line, p));
        } else if periodic {
            out.push((a, line, 0));
        }
        if p + 1 < n {
            out.push((a, line, p + 1));
        } else if periodic {
            out.push((a, line, 0));
        }
    }
}

/// Variation over the facets next to the `touched` cells of a slice.
fn local_variation<F: Fn(usize) -> f64>(g: &GridSpec, touched: &[usize], value: F) -> f64 {
    let mut facets = Vec::with_capacity(4 * touched.len());
    for &i in touched {
        cell_facets(g, i, &mut facets);
    }
    facets.sort_unstable();
    facets.dedup();
    let n0 = g.n[0];
    let at = |a: usize, line: usize, p: usize| {
        if a == 0 {
            value(p + n0 * line)
        } else {
            value(line + n0 * p)
        }
    };
    facets
        .iter()
        .map(|&(a, line, f)| {
            let n = g.n[a];
            let (lo, hi) = if f == 0 { (n - 1, 0) } else { (f - 1, f) };
            let measure = if g.d == 1 { 1.0 } else { g.dx(1 - a) };
            (at(a, line, hi) - at(a, line, lo)).abs() * measure
        })
        .sum()
}

/// Variation of a whole slice.
fn slice_variation(g: &GridSpec, slice: &[f64]) -> f64 {
    let all: Vec<usize> = (0..g.slice_cells()).collect();
    local_variation(g, &all, |i| slice[i])
}
