//! Boundary layer that turns the averaged flux `ḡ` into the prescribed
//! flux `g`.
//!
//! The layer `A_r` of width `r` along the lateral boundary is tiled by
//! square plaquettes of side `r`. In every plaquette and on every level the
//! oscillating flux `f = g - ḡ` is split into its mean over the plaquette's
//! outer boundary and the remainder. The remainder is carried by a
//! divergence-free field `h₁`. The mean is balanced by a magnetisation
//! `m_r = λ(m̄ - m₀)` whose charge feeds a second field `h₂`; `λ` is fixed
//! slice by slice by the cumulative mean flux and `m̄ = ±1` by its sign.

use crate::data::{boundary_facets, slice_boundary_facets, BoundaryFacet};
use crate::over::{
    generating_fields, interpolated_magnetisation, neumann_solver, solve_over_relaxed,
    solve_with_flux,
};
use crate::{BoundaryData, RelaxedError, Result};
use branchlab_core::{GridSpec, Magnetisation, Mode, StrayField};
use branchlab_elliptic::{pairwise_sum, FacetField, SliceGrid};
use branchlab_energy::{facet_sup_sq, field_energy};
use rayon::prelude::*;

/// Default constant of the layer-size condition
/// `r/L ≥ C·max{(T²/L² ⨍(g-ḡ)²)^{1/(d+1)}, (T/L) sup|h̄|, sup|H^B|/L}`.
pub const LAYER_CONSTANT: f64 = 1.0;

/// Recorded bound on [`LayerReport::field_ratio`] for data that satisfy the
/// layer-size condition with [`LAYER_CONSTANT`].
pub const FIELD_RATIO_CONSTANT: f64 = 4.0;

/// Square plaquette of the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Plaquette {
    /// Lowest cell per axis.
    pub lo: [usize; 2],
    /// Cells per axis.
    pub size: [usize; 2],
    /// Face the plaquette is attributed to; corner plaquettes go to the face
    /// of the lower axis.
    pub face: (usize, bool),
    /// Local outer facets paired with their position in [`boundary_facets`].
    pub outer: Vec<(usize, BoundaryFacet)>,
}

impl Plaquette {
    /// Grid of the plaquette as a slice of its own.
    pub fn slice_grid(&self, grid: &GridSpec) -> SliceGrid {
        if grid.d == 1 {
            SliceGrid::line(self.size[0], grid.dx(0))
        } else {
            SliceGrid::plane(self.size, [grid.dx(0), grid.dx(1)])
        }
    }

    /// Area of the plaquette.
    pub fn area(&self, grid: &GridSpec) -> f64 {
        self.slice_grid(grid).cell_area() * (self.size[0] * self.size[1]) as f64
    }

    /// Measure of the plaquette's outer boundary.
    pub fn outer_measure(&self) -> f64 {
        self.outer.iter().map(|(_, b)| b.measure).sum()
    }
}

/// Tiles the layer of width `r_cells` cells by square plaquettes.
pub fn plaquettes(grid: &GridSpec, r_cells: usize) -> Result<Vec<Plaquette>> {
    let d = grid.d;
    if r_cells == 0 {
        return Err(RelaxedError::DegenerateTiling("zero layer width".into()));
    }
    if d == 2 && (grid.dx(0) - grid.dx(1)).abs() > 1e-12 * grid.dx(0) {
        return Err(RelaxedError::DegenerateTiling(
            "square plaquettes need equal cell widths".into(),
        ));
    }
    let mut blocks = [1usize; 2];
    for a in 0..d {
        let n = grid.n[a];
        if n % r_cells != 0 || n / r_cells < 2 {
            return Err(RelaxedError::DegenerateTiling(format!(
                "{r_cells} cells do not tile axis {a} of {n} cells with an inner core"
            )));
        }
        blocks[a] = n / r_cells;
    }
    let size = if d == 1 {
        [r_cells, 1]
    } else {
        [r_cells, r_cells]
    };
    let [n0, n1] = grid.n;
    let offset = |axis: usize, high: bool| -> usize {
        match (axis, high) {
            (0, false) => 0,
            (0, true) => n1,
            (_, false) => 2 * n1,
            (_, true) => 2 * n1 + n0,
        }
    };
    let mut out = Vec::new();
    for p1 in 0..blocks[1] {
        for p0 in 0..blocks[0] {
            let p = [p0, p1];
            let on = |a: usize, high: bool| {
                a < d
                    && if high {
                        p[a] == blocks[a] - 1
                    } else {
                        p[a] == 0
                    }
            };
            if !(0..d).any(|a| on(a, false) || on(a, true)) {
                continue;
            }
            let face = if on(0, false) {
                (0, false)
            } else if on(0, true) {
                (0, true)
            } else if on(1, false) {
                (1, false)
            } else {
                (1, true)
            };
            let lo = [p0 * size[0], p1 * size[1]];
            let local = Plaquette {
                lo,
                size,
                face,
                outer: Vec::new(),
            };
            let psg = local.slice_grid(grid);
            let outer = slice_boundary_facets(&psg)
                .into_iter()
                .filter(|b| on(b.axis, b.high))
                .map(|b| (offset(b.axis, b.high) + lo[1 - b.axis] + b.t, b))
                .collect();
            out.push(Plaquette { outer, ..local });
        }
    }
    Ok(out)
}

/// Summary of one layer construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerReport {
    /// `(r/L) / q`, where `q` is the maximum in the layer-size condition;
    /// the condition with constant `C` holds iff this is at least `C`.
    pub layer_ratio: f64,
    /// Largest interpolation weight over plaquettes and slices.
    pub max_lambda: f64,
    /// Largest `|⨍_P m₀|` over plaquettes and slices.
    pub max_plaquette_mean: f64,
    /// `⨍_Γ (g - ḡ)²`.
    pub oscillation_sq: f64,
    /// `(T²/L²)(1/|Q|)∫|h_r|²` divided by `(r/L)(T²/L²)⨍(g-ḡ)²`.
    pub field_ratio: f64,
    /// `T‖∂_z m_r‖²_{L²L^∞}` divided by `(r/L)^{-(d+1)}(T²/L²)⨍(g-ḡ)²`.
    pub slope_ratio: f64,
}

/// The layer pair `(m_r, h_r = h₁ + h₂)` and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLayerPair {
    /// Layer magnetisation, zero outside the layer.
    pub m_r: Magnetisation,
    /// Layer field with outward flux `g - ḡ` on the lateral boundary.
    pub h_r: StrayField,
    /// Divergence-free part carrying the oscillation inside each plaquette.
    pub h1: StrayField,
    /// Part balancing the charge of `m_r`.
    pub h2: StrayField,
    /// Layer width in length units.
    pub r: f64,
    /// Layer width in cells.
    pub r_cells: usize,
    /// Plaquette tiling of the layer.
    pub plaquettes: Vec<Plaquette>,
    /// Per plaquette: `λ` at the bottom face, on every slice, and at the
    /// top face (`n_v + 2` stations).
    pub lambda: Vec<Vec<f64>>,
    /// Diagnostics.
    pub report: LayerReport,
}

/// Scalar weights of one plaquette.
struct Weights {
    /// Stations: bottom face, slices, top face.
    lambda: Vec<f64>,
    /// `m̄` per slice.
    mbar: Vec<f64>,
    /// Compensated total outer flux per level.
    flux: Vec<f64>,
    /// Mean `|⨍_P m₀|` per slice, maximised.
    max_mean: f64,
}

/// `(λ, m̄)` for the cumulative numerator `c` and the plaquette mean `a`.
fn weight(c: f64, a: f64) -> (f64, f64) {
    if c == 0.0 {
        return (0.0, 1.0);
    }
    let mbar = if c > 0.0 { 1.0 } else { -1.0 };
    let den = mbar - a;
    let lam = if den * mbar > 0.0 {
        c / den
    } else {
        f64::INFINITY
    };
    (lam, mbar)
}

fn plaquette_weights(
    grid: &GridSpec,
    bd: &BoundaryData,
    m0: &Magnetisation,
    p: &Plaquette,
) -> Weights {
    let levels = grid.levels();
    let mean = bd.mean_flux();
    let area = p.area(grid);
    let dz = grid.dz();
    let mut flux: Vec<f64> = (0..levels)
        .map(|k| {
            let g = bd.flux_level(k);
            let terms: Vec<f64> = p
                .outer
                .iter()
                .map(|(j, b)| b.measure * (g[*j] - mean[*j]))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    // The oscillating flux integrates to zero over the height; the last
    // level takes the exact complement so the layer closes at the top.
    let head: f64 = flux[..levels - 1].iter().sum();
    flux[levels - 1] = -head;
    let mut lambda = Vec::with_capacity(grid.n_v + 2);
    let mut mbar = Vec::with_capacity(grid.n_v);
    lambda.push(0.0);
    let mut cumulative = 0.0;
    let mut max_mean = 0.0_f64;
    let cell_area = grid.cell_area();
    for k in 0..grid.n_v {
        cumulative += flux[k];
        let s = m0.slice(k);
        let mut sum = 0.0;
        for i1 in p.lo[1]..p.lo[1] + p.size[1] {
            for i0 in p.lo[0]..p.lo[0] + p.size[0] {
                sum += s[i0 + grid.n[0] * i1];
            }
        }
        let a = sum * cell_area / area;
        max_mean = max_mean.max(a.abs());
        let (lam, mb) = weight(-dz * cumulative / area, a);
        lambda.push(lam);
        mbar.push(mb);
    }
    cumulative += flux[levels - 1];
    lambda.push(weight(-dz * cumulative / area, 0.0).0);
    Weights {
        lambda,
        mbar,
        flux,
        max_mean,
    }
}

/// Ingredients shared by the probe and the full construction.
struct Setup {
    m0: Magnetisation,
    tiles: Vec<Plaquette>,
    weights: Vec<Weights>,
    layer_ratio: f64,
    oscillation_sq: f64,
    big_l: f64,
}

fn setup(bd: &BoundaryData, r_cells: usize) -> Result<Setup> {
    let grid = *bd.grid();
    let tiles = plaquettes(&grid, r_cells)?;
    let m0 = interpolated_magnetisation(bd)?;
    let weights: Vec<Weights> = tiles
        .par_iter()
        .map(|p| plaquette_weights(&grid, bd, &m0, p))
        .collect();
    let big_l = grid.half[0].max(grid.half[1] * (grid.d - 1) as f64);
    let t = grid.height;
    let oscillation_sq = bd.oscillation_sq_mean();
    let hbar = solve_over_relaxed(bd)?.field;
    let (hb, _) = generating_fields(bd)?;
    let q = [
        ((t * t) / (big_l * big_l) * oscillation_sq).powf(1.0 / (grid.d + 1) as f64),
        t / big_l * facet_sup_sq(&grid, &hbar).sqrt(),
        facet_sup_sq(&grid, &hb).sqrt() / big_l,
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    let r_over_l = r_cells as f64 * grid.dx(0) / big_l;
    let layer_ratio = if q > 0.0 { r_over_l / q } else { f64::INFINITY };
    Ok(Setup {
        m0,
        tiles,
        weights,
        layer_ratio,
        oscillation_sq,
        big_l,
    })
}

/// Evaluates the layer-size ratio and the interpolation weights without
/// building fields and without enforcing `λ ≤ ½`.
pub fn layer_probe(bd: &BoundaryData, r_cells: usize) -> Result<LayerReport> {
    let s = setup(bd, r_cells)?;
    let max_lambda = s
        .weights
        .iter()
        .flat_map(|w| w.lambda.iter().copied())
        .fold(0.0, f64::max);
    let max_plaquette_mean = s.weights.iter().map(|w| w.max_mean).fold(0.0, f64::max);
    Ok(LayerReport {
        layer_ratio: s.layer_ratio,
        max_lambda,
        max_plaquette_mean,
        oscillation_sq: s.oscillation_sq,
        field_ratio: f64::NAN,
        slope_ratio: f64::NAN,
    })
}

/// Smallest layer constant that the probes support: the largest layer
/// ratio at which some probe still needed `λ > ½` (0 if none did).
pub fn critical_layer_constant(probes: &[LayerReport]) -> f64 {
    probes
        .iter()
        .filter(|p| p.max_lambda > 0.5)
        .map(|p| p.layer_ratio)
        .fold(0.0, f64::max)
}

/// Seeded data from [`BoundaryData::random`] scaled so that the layer of
/// `r_cells` cells has layer ratio `target` (up to a relative `1e-9`, from
/// above), which makes the layer-size condition hold for every constant up
/// to `target`.
pub fn conditioned_data(
    grid: &GridSpec,
    seed: u64,
    r_cells: usize,
    target: f64,
) -> Result<BoundaryData> {
    let m_amplitude = 0.9;
    let base = BoundaryData::random(*grid, seed, 1.0, m_amplitude)?;
    let ratio = |s: f64| -> Result<f64> { Ok(layer_probe(&base.scaled(s)?, r_cells)?.layer_ratio) };
    let (mut lo, mut hi) = (0.0_f64, 1.0 / m_amplitude);
    if ratio(hi)? >= target {
        return base.scaled(hi);
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && ratio(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    base.scaled(lo)
}

/// Per-plaquette fields on every level.
struct PlaquetteFields {
    m: Vec<f64>,
    h1: Vec<FacetField>,
    h2: Vec<FacetField>,
}

fn plaquette_fields(
    grid: &GridSpec,
    bd: &BoundaryData,
    m0: &Magnetisation,
    p: &Plaquette,
    w: &Weights,
) -> Result<PlaquetteFields> {
    let psg = p.slice_grid(grid);
    let solver = neumann_solver(psg)?;
    let cells = psg.cells();
    let mean = bd.mean_flux();
    let mut m = vec![0.0; cells * grid.n_v];
    for k in 0..grid.n_v {
        let s = m0.slice(k);
        let lam = w.lambda[k + 1];
        for i1 in 0..p.size[1] {
            for i0 in 0..p.size[0] {
                let global = s[p.lo[0] + i0 + grid.n[0] * (p.lo[1] + i1)];
                m[k * cells + psg.cell(i0, i1)] = lam * (w.mbar[k] - global);
            }
        }
    }
    let outer: Vec<BoundaryFacet> = p.outer.iter().map(|(_, b)| *b).collect();
    let measure = p.outer_measure();
    let zero = vec![0.0; cells];
    let mut h1 = Vec::with_capacity(grid.levels());
    let mut h2 = Vec::with_capacity(grid.levels());
    for k in 0..grid.levels() {
        let g = bd.flux_level(k);
        let f: Vec<f64> = p.outer.iter().map(|(j, _)| g[*j] - mean[*j]).collect();
        let weighted: Vec<f64> = f.iter().zip(&outer).map(|(v, b)| v * b.measure).collect();
        let avg = pairwise_sum(&weighted) / measure;
        let osc: Vec<f64> = f.iter().map(|v| v - avg).collect();
        h1.push(solve_with_flux(&solver, &zero, &outer, &osc)?.1);
        let upper = (k < grid.n_v).then(|| &m[k * cells..(k + 1) * cells]);
        let lower = (k > 0).then(|| &m[(k - 1) * cells..k * cells]);
        let rho: Vec<f64> = (0..cells)
            .map(|c| -(upper.map_or(0.0, |u| u[c]) - lower.map_or(0.0, |l| l[c])) / grid.dz())
            .collect();
        let uniform = vec![w.flux[k] / measure; outer.len()];
        h2.push(solve_with_flux(&solver, &rho, &outer, &uniform)?.1);
    }
    Ok(PlaquetteFields { m, h1, h2 })
}

/// Adds a plaquette field into level `k` of the global field.
fn scatter(h: &mut StrayField, k: usize, grid: &GridSpec, p: &Plaquette, f: &FacetField) {
    let psg = p.slice_grid(grid);
    let gsg = grid.slice_grid();
    let [c0, c1] = h.level_mut(k);
    for i1 in 0..p.size[1] {
        for f0 in 0..=p.size[0] {
            c0[gsg.facet0(p.lo[0] + f0, p.lo[1] + i1)] += f.comps[0][psg.facet0(f0, i1)];
        }
    }
    if grid.d == 2 {
        for f1 in 0..=p.size[1] {
            for i0 in 0..p.size[0] {
                c1[gsg.facet1(p.lo[0] + i0, p.lo[1] + f1)] += f.comps[1][psg.facet1(i0, f1)];
            }
        }
    }
}

/// Builds the layer pair of width `r_cells` cells.
///
/// Fails with [`RelaxedError::RTooSmall`] when the layer-size condition with
/// constant `c_layer` is violated, and with
/// [`RelaxedError::LambdaOutOfRange`] when some weight leaves `[0, ½]`.
pub fn boundary_layer(
    bd: &BoundaryData,
    r_cells: usize,
    c_layer: f64,
) -> Result<BoundaryLayerPair> {
    let grid = *bd.grid();
    let s = setup(bd, r_cells)?;
    if s.layer_ratio < c_layer {
        let r_over_l = r_cells as f64 * grid.dx(0) / s.big_l;
        return Err(RelaxedError::RTooSmall {
            required: r_over_l * c_layer / s.layer_ratio,
            got: r_over_l,
        });
    }
    for (pi, w) in s.weights.iter().enumerate() {
        for (station, &lam) in w.lambda.iter().enumerate() {
            if !(0.0..=0.5).contains(&lam) {
                return Err(RelaxedError::LambdaOutOfRange {
                    plaquette: pi,
                    slice: station.saturating_sub(1),
                    value: lam,
                });
            }
        }
    }
    let fields: Vec<PlaquetteFields> = s
        .tiles
        .par_iter()
        .zip(&s.weights)
        .map(|(p, w)| plaquette_fields(&grid, bd, &s.m0, p, w))
        .collect::<Result<_>>()?;
    let mut m_values = vec![0.0; grid.cells()];
    let mut h1 = StrayField::zeros(grid);
    let mut h2 = StrayField::zeros(grid);
    for (p, f) in s.tiles.iter().zip(&fields) {
        let psg = p.slice_grid(&grid);
        for k in 0..grid.n_v {
            for i1 in 0..p.size[1] {
                for i0 in 0..p.size[0] {
                    m_values[grid.idx(p.lo[0] + i0, p.lo[1] + i1, k)] =
                        f.m[k * psg.cells() + psg.cell(i0, i1)];
                }
            }
        }
        for k in 0..grid.levels() {
            scatter(&mut h1, k, &grid, p, &f.h1[k]);
            scatter(&mut h2, k, &grid, p, &f.h2[k]);
        }
    }
    let m_r = Magnetisation::new(grid, m_values, Mode::Relaxed)?;
    let h_r = h1.add(&h2)?;

    let big_l = s.big_l;
    let r = r_cells as f64 * grid.dx(0);
    let t = grid.height;
    let volume = grid.cross_section() * grid.field_height();
    let scale = (t * t) / (big_l * big_l) * s.oscillation_sq;
    let field_ratio = if scale > 0.0 {
        (t * t) / (big_l * big_l) * 2.0 * field_energy(&h_r) / volume / ((r / big_l) * scale)
    } else {
        0.0
    };
    let mut slope = Vec::with_capacity(grid.levels());
    for k in 0..grid.levels() {
        let upper = (k < grid.n_v).then(|| m_r.slice(k));
        let lower = (k > 0).then(|| m_r.slice(k - 1));
        let mut sup = 0.0_f64;
        for c in 0..grid.slice_cells() {
            let jump = upper.map_or(0.0, |u| u[c]) - lower.map_or(0.0, |l| l[c]);
            sup = sup.max((jump / grid.dz()).abs());
        }
        slope.push(grid.dz() * sup * sup);
    }
    let slope_ratio = if scale > 0.0 {
        t * pairwise_sum(&slope) / ((r / big_l).powi(-(grid.d as i32 + 1)) * scale)
    } else {
        0.0
    };
    let max_lambda = s
        .weights
        .iter()
        .flat_map(|w| w.lambda.iter().copied())
        .fold(0.0, f64::max);
    let max_plaquette_mean = s.weights.iter().map(|w| w.max_mean).fold(0.0, f64::max);
    Ok(BoundaryLayerPair {
        m_r,
        h_r,
        h1,
        h2,
        r,
        r_cells,
        lambda: s.weights.into_iter().map(|w| w.lambda).collect(),
        plaquettes: s.tiles,
        report: LayerReport {
            layer_ratio: s.layer_ratio,
            max_lambda,
            max_plaquette_mean,
            oscillation_sq: s.oscillation_sq,
            field_ratio,
            slope_ratio,
        },
    })
}

/// All boundary facets of `grid` that the tiling leaves uncovered (none for
/// a valid tiling).
pub fn uncovered_facets(grid: &GridSpec, tiles: &[Plaquette]) -> usize {
    let mut seen = vec![false; boundary_facets(grid).len()];
    for p in tiles {
        for (j, _) in &p.outer {
            seen[*j] = true;
        }
    }
    seen.iter().filter(|s| !**s).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use branchlab_core::LateralBc;

    #[test]
    fn tiling_covers_the_boundary_once() {
        let g = GridSpec::new(2, 16, 2, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let tiles = plaquettes(&g, 4).unwrap();
        assert_eq!(tiles.len(), 12);
        assert_eq!(uncovered_facets(&g, &tiles), 0);
        let outer: usize = tiles.iter().map(|p| p.outer.len()).sum();
        assert_eq!(outer, boundary_facets(&g).len());
        let corner = tiles.iter().find(|p| p.lo == [0, 0]).unwrap();
        assert_eq!(corner.face, (0, false));
        assert!(matches!(
            plaquettes(&g, 3),
            Err(RelaxedError::DegenerateTiling(_))
        ));
        assert!(matches!(
            plaquettes(&g, 16),
            Err(RelaxedError::DegenerateTiling(_))
        ));
    }

    #[test]
    fn averaged_flux_needs_no_layer() {
        let g = GridSpec::new(2, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let bd = BoundaryData::zero(g).unwrap();
        let pair = boundary_layer(&bd, 2, LAYER_CONSTANT).unwrap();
        assert_eq!(
            pair.m_r
                .values()
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max),
            0.0
        );
        assert_eq!(pair.h_r.max_abs(), 0.0);
    }

    #[test]
    fn weights_vanish_at_both_faces() {
        let g = GridSpec::new(1, 16, 8, 2.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let bd = BoundaryData::random(g, 4, 1e-3, 0.1).unwrap();
        let pair = boundary_layer(&bd, 4, 1.0).unwrap();
        for l in &pair.lambda {
            assert_eq!(l[0], 0.0);
            assert_eq!(*l.last().unwrap(), 0.0);
            assert!(l.iter().all(|v| (0.0..=0.5).contains(v)));
        }
    }
}
