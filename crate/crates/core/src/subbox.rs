//! Sub-boxes `Q_{ℓ,t}(a)` and restriction of fields to them.

use crate::field::{Magnetisation, StrayField};
use crate::grid::{GridSpec, LateralBc, VerticalFace};
use crate::{CoreError, Result};

/// Relative tolerance used when converting lengths to cell counts.
const ALIGN_TOL: f64 = 1e-9;

/// Vertical face a sub-box is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    Bottom,
    Top,
}

/// The box `a + [-ℓ, ℓ]^d × I`, where `I = [0, t]` for a bottom anchor and
/// `[T - t, T]` for a top anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubCuboid {
    /// Horizontal centre (the second entry is ignored for `d = 1`).
    pub a: [f64; 2],
    pub anchor: Anchor,
    /// Half-width `ℓ`.
    pub half: f64,
    /// Height `t`.
    pub height: f64,
}

/// Integer cell range `[lo, hi) × [k_lo, k_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellBox {
    pub lo: [usize; 2],
    pub hi: [usize; 2],
    pub k_lo: usize,
    pub k_hi: usize,
}

fn to_count(x: f64, what: &str) -> Result<usize> {
    let r = x.round();
    if !x.is_finite() || (x - r).abs() > ALIGN_TOL * r.abs().max(1.0) {
        return Err(CoreError::Misaligned(format!("{what} = {x} cells")));
    }
    if r < 0.0 {
        return Err(CoreError::OutOfDomain(format!("{what} = {x} cells")));
    }
    Ok(r as usize)
}

impl SubCuboid {
    /// Bottom-anchored box centred at `a`.
    pub fn bottom(a: [f64; 2], half: f64, height: f64) -> Self {
        Self {
            a,
            anchor: Anchor::Bottom,
            half,
            height,
        }
    }

    /// Top-anchored box centred at `a`.
    pub fn top(a: [f64; 2], half: f64, height: f64) -> Self {
        Self {
            a,
            anchor: Anchor::Top,
            half,
            height,
        }
    }

    /// Cell range covered on `grid`.
    ///
    /// Floating-point noise is absorbed; a box whose faces do not lie on
    /// cell boundaries is an error.
    pub fn to_cells(&self, grid: &GridSpec) -> Result<CellBox> {
        if !(self.half > 0.0 && self.height > 0.0) {
            return Err(CoreError::Misaligned(format!(
                "non-positive size ({}, {})",
                self.half, self.height
            )));
        }
        let mut lo = [0, 0];
        let mut hi = [grid.n[0], grid.n[1]];
        for a in 0..grid.d {
            let dx = grid.dx(a);
            lo[a] = to_count((self.a[a] - self.half + grid.half[a]) / dx, "lower face")?;
            let w = to_count(2.0 * self.half / dx, "width")?;
            hi[a] = lo[a] + w;
            if hi[a] > grid.n[a] {
                return Err(CoreError::OutOfDomain(format!(
                    "axis {a}: cells {}..{}",
                    lo[a], hi[a]
                )));
            }
        }
        let nt = to_count(self.height / grid.dz(), "height")?;
        if nt == 0 || nt > grid.n_v {
            return Err(CoreError::OutOfDomain(format!(
                "{nt} slices of {}",
                grid.n_v
            )));
        }
        let (k_lo, k_hi) = match self.anchor {
            Anchor::Bottom => (0, nt),
            Anchor::Top => (grid.n_v - nt, grid.n_v),
        };
        let cb = CellBox { lo, hi, k_lo, k_hi };
        cb.check(grid)?;
        Ok(cb)
    }
}

impl CellBox {
    /// The whole grid.
    pub fn full(grid: &GridSpec) -> Self {
        Self {
            lo: [0, 0],
            hi: grid.n,
            k_lo: 0,
            k_hi: grid.n_v,
        }
    }

    /// Fails unless the box is non-empty and inside `grid`.
    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        for a in 0..2 {
            if self.lo[a] >= self.hi[a] || self.hi[a] > grid.n[a] {
                return Err(CoreError::OutOfDomain(format!(
                    "axis {a}: {}..{}",
                    self.lo[a], self.hi[a]
                )));
            }
        }
        if self.k_lo >= self.k_hi || self.k_hi > grid.n_v {
            return Err(CoreError::OutOfDomain(format!(
                "slices {}..{}",
                self.k_lo, self.k_hi
            )));
        }
        Ok(())
    }

    /// Cells per axis.
    pub fn size(&self) -> [usize; 2] {
        [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]]
    }

    /// Number of slices.
    pub fn slices(&self) -> usize {
        self.k_hi - self.k_lo
    }

    /// True if the box spans the whole of axis `a`.
    pub fn spans(&self, grid: &GridSpec, a: usize) -> bool {
        self.lo[a] == 0 && self.hi[a] == grid.n[a]
    }

    /// Geometry of the box as a grid of its own.
    ///
    /// Axes the box spans keep their condition, other axes become free.
    /// Vertical faces keep their type on the slab boundary and become cut
    /// faces inside.
    pub fn sub_grid(&self, grid: &GridSpec) -> Result<GridSpec> {
        self.check(grid)?;
        let n = self.size();
        let half = [0, 1].map(|a| n[a] as f64 * grid.dx(a) / 2.0);
        let bc = [0, 1].map(|a| {
            if self.spans(grid, a) {
                grid.bc[a]
            } else {
                LateralBc::Free
            }
        });
        let bottom = if self.k_lo == 0 {
            grid.bottom
        } else {
            VerticalFace::Cut
        };
        let top = if self.k_hi == grid.n_v {
            grid.top
        } else {
            VerticalFace::Cut
        };
        GridSpec::with_parts(
            grid.d,
            n,
            self.slices(),
            half,
            self.slices() as f64 * grid.dz(),
            bc,
            bottom,
            top,
        )
    }
}

/// Copy of the cells of `m` inside `cb`.
pub fn restrict(m: &Magnetisation, cb: &CellBox) -> Result<Magnetisation> {
    let g = m.grid();
    let sub = cb.sub_grid(g)?;
    let mut values = Vec::with_capacity(sub.cells());
    for k in cb.k_lo..cb.k_hi {
        for i1 in cb.lo[1]..cb.hi[1] {
            let row = g.idx(cb.lo[0], i1, k);
            values.extend_from_slice(&m.values()[row..row + sub.n[0]]);
        }
    }
    Magnetisation::new(sub, values, m.mode())
}

/// Copy of the field levels and facets of `h` bounding the cells in `cb`.
pub fn restrict_field(h: &StrayField, cb: &CellBox) -> Result<StrayField> {
    let g = h.grid();
    let sub = cb.sub_grid(g)?;
    let sg = g.slice_grid();
    let mut c0 = Vec::with_capacity(sub.levels() * sub.facets(0));
    let mut c1 = Vec::with_capacity(sub.levels() * sub.facets(1));
    for k in cb.k_lo..=cb.k_hi {
        let [l0, l1] = h.level(k);
        for i1 in cb.lo[1]..cb.hi[1] {
            for f0 in cb.lo[0]..=cb.hi[0] {
                c0.push(l0[sg.facet0(f0, i1)]);
            }
        }
        if g.d == 2 {
            for f1 in cb.lo[1]..=cb.hi[1] {
                for i0 in cb.lo[0]..cb.hi[0] {
                    c1.push(l1[sg.facet1(i0, f1)]);
                }
            }
        }
    }
    StrayField::from_parts(sub, [c0, c1])
}
