//! Lateral flux and top/bottom magnetisation data of the relaxed problem.
//!
//! The lateral flux `g` is the outward normal component `h·ν` on every
//! boundary facet of every field level. The relaxed problem sees the
//! magnetisation `m^B` below the bottom face and `m^T` above the top face,
//! so the charge of level `k` is `-(m_k - m_{k-1})/Δz` with `m_{-1} = m^B`
//! and `m_{n_v} = m^T`. All levels carry unit weight.

use crate::{RelaxedError, Result};
use branchlab_core::{CellBox, GridSpec, LateralBc, Magnetisation, StrayField, VerticalFace};
use branchlab_elliptic::{pairwise_sum, FacetField, SliceGrid};
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Relative tolerance of the compatibility balance.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// One facet of a slice on the lateral boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFacet {
    /// Axis normal to the facet.
    pub axis: usize,
    /// `true` on the upper end of the axis, where the outward normal is `+e_axis`.
    pub high: bool,
    /// Cell index along the other axis.
    pub t: usize,
    /// Position in the facet array of component `axis`.
    pub index: usize,
    /// Facet measure (1 for `d = 1`).
    pub measure: f64,
}

impl BoundaryFacet {
    /// Sign of the outward normal along `axis`.
    pub fn sign(&self) -> f64 {
        if self.high {
            1.0
        } else {
            -1.0
        }
    }
}

/// Boundary facets of a slice grid, face by face: low and high end of
/// axis 0, then low and high end of axis 1.
pub fn slice_boundary_facets(sg: &SliceGrid) -> Vec<BoundaryFacet> {
    let [n0, n1] = sg.n;
    let mut out = Vec::new();
    for high in [false, true] {
        let f0 = if high { n0 } else { 0 };
        for t in 0..n1 {
            out.push(BoundaryFacet {
                axis: 0,
                high,
                t,
                index: sg.facet0(f0, t),
                measure: sg.facet_measure(0),
            });
        }
    }
    if sg.dims == 2 {
        for high in [false, true] {
            let f1 = if high { n1 } else { 0 };
            for t in 0..n0 {
                out.push(BoundaryFacet {
                    axis: 1,
                    high,
                    t,
                    index: sg.facet1(t, f1),
                    measure: sg.facet_measure(1),
                });
            }
        }
    }
    out
}

/// Boundary facets of the slices of `grid`.
pub fn boundary_facets(grid: &GridSpec) -> Vec<BoundaryFacet> {
    slice_boundary_facets(&grid.slice_grid())
}

/// Facet field that vanishes inside and carries the outward flux `values`
/// on the listed boundary facets.
pub(crate) fn flux_field(sg: &SliceGrid, facets: &[BoundaryFacet], values: &[f64]) -> FacetField {
    let mut b = FacetField::zeros(sg);
    for (bf, v) in facets.iter().zip(values) {
        b.comps[bf.axis][bf.index] = bf.sign() * v;
    }
    b
}

/// Checks that `grid` can host relaxed boundary data: every active axis
/// takes its flux from the data (zero-flux layout) and both faces are closed.
pub fn check_relaxed_grid(grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    for a in 0..grid.d {
        if grid.bc[a] != LateralBc::ZeroFlux {
            return Err(RelaxedError::InvalidData(format!(
                "axis {a} must use the zero-flux layout, found {}",
                grid.bc[a].name()
            )));
        }
    }
    if grid.bottom != VerticalFace::Closed || grid.top != VerticalFace::Closed {
        return Err(RelaxedError::InvalidData(
            "both horizontal faces must be closed".into(),
        ));
    }
    Ok(())
}

/// Lateral flux and top/bottom magnetisation on a box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    grid: GridSpec,
    /// Outward flux, level after level, in the order of [`boundary_facets`].
    g: Vec<f64>,
    m_bottom: Vec<f64>,
    m_top: Vec<f64>,
}

impl BoundaryData {
    /// Validates shapes, ranges and the compatibility balance.
    pub fn new(grid: GridSpec, g: Vec<f64>, m_bottom: Vec<f64>, m_top: Vec<f64>) -> Result<Self> {
        check_relaxed_grid(&grid)?;
        let nb = boundary_facets(&grid).len();
        if g.len() != nb * grid.levels() {
            return Err(RelaxedError::InvalidData(format!(
                "flux has {} values, expected {}",
                g.len(),
                nb * grid.levels()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(RelaxedError::InvalidData("non-finite flux".into()));
        }
        for (name, m) in [("bottom", &m_bottom), ("top", &m_top)] {
            if m.len() != grid.slice_cells() {
                return Err(RelaxedError::InvalidData(format!(
                    "{name} magnetisation has {} values, expected {}",
                    m.len(),
                    grid.slice_cells()
                )));
            }
            if let Some(v) = m.iter().find(|v| !(v.abs() <= 1.0)) {
                return Err(RelaxedError::InvalidData(format!(
                    "{name} magnetisation value {v} outside [-1, 1]"
                )));
            }
        }
        let data = Self {
            grid,
            g,
            m_bottom,
            m_top,
        };
        data.check_compatible()?;
        Ok(data)
    }

    /// No flux and zero top/bottom magnetisation.
    pub fn zero(grid: GridSpec) -> Result<Self> {
        check_relaxed_grid(&grid)?;
        let nb = boundary_facets(&grid).len();
        let s = grid.slice_cells();
        Self::new(
            grid,
            vec![0.0; nb * grid.levels()],
            vec![0.0; s],
            vec![0.0; s],
        )
    }

    /// Boundary data that the pair `(m, h)` induces on the box `cb`.
    ///
    /// The flux is `h·ν` on the lateral box boundary, and the top/bottom
    /// magnetisation is the slice just outside the box (zero beyond a
    /// closed face of the slab). The returned data live on the box grid
    /// with zero-flux layout and closed faces.
    pub fn from_pair(m: &Magnetisation, h: &StrayField, cb: &CellBox) -> Result<Self> {
        let g = *m.grid();
        g.ensure_same(h.grid())?;
        let sub = cb.sub_grid(&g)?;
        let grid = GridSpec::with_parts(
            g.d,
            sub.n,
            sub.n_v,
            sub.half,
            sub.height,
            [LateralBc::ZeroFlux; 2],
            VerticalFace::Closed,
            VerticalFace::Closed,
        )?;
        let gsg = g.slice_grid();
        let facets = boundary_facets(&grid);
        let mut flux = Vec::with_capacity(facets.len() * grid.levels());
        for j in 0..grid.levels() {
            let level = h.level(cb.k_lo + j);
            for bf in &facets {
                let global = if bf.axis == 0 {
                    let f0 = if bf.high { cb.hi[0] } else { cb.lo[0] };
                    gsg.facet0(f0, cb.lo[1] + bf.t)
                } else {
                    let f1 = if bf.high { cb.hi[1] } else { cb.lo[1] };
                    gsg.facet1(cb.lo[0] + bf.t, f1)
                };
                flux.push(bf.sign() * level[bf.axis][global]);
            }
        }
        let outside = |k: Option<usize>, face: VerticalFace| -> Result<Vec<f64>> {
            match k {
                Some(k) => {
                    let s = m.slice(k);
                    let mut out = Vec::with_capacity(grid.slice_cells());
                    for i1 in cb.lo[1]..cb.hi[1] {
                        for i0 in cb.lo[0]..cb.hi[0] {
                            out.push(s[i0 + g.n[0] * i1]);
                        }
                    }
                    Ok(out)
                }
                None if face == VerticalFace::Closed => Ok(vec![0.0; grid.slice_cells()]),
                None => Err(RelaxedError::InvalidData(
                    "the box touches a cut face of the slab".into(),
                )),
            }
        };
        let m_bottom = outside(cb.k_lo.checked_sub(1), g.bottom)?;
        let m_top = outside((cb.k_hi < g.n_v).then_some(cb.k_hi), g.top)?;
        Self::new(grid, flux, m_bottom, m_top)
    }

    /// A seeded family of smooth compatible data with `m^B = 0`.
    ///
    /// `m^T` is a random combination of low cosine modes with sup at most
    /// `m_amplitude`; the flux is uniform noise of size `flux_amplitude`
    /// plus the constant that restores compatibility.
    pub fn random(
        grid: GridSpec,
        seed: u64,
        flux_amplitude: f64,
        m_amplitude: f64,
    ) -> Result<Self> {
        check_relaxed_grid(&grid)?;
        if !(0.0..=1.0).contains(&m_amplitude) {
            return Err(RelaxedError::InvalidData(format!(
                "magnetisation amplitude {m_amplitude}"
            )));
        }
        let mut rng = SplitMix64::seed_from_u64(seed);
        let mut uniform =
            move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0;
        let modes: Vec<[f64; 3]> = (0..4).map(|_| [uniform(), uniform(), uniform()]).collect();
        let total: f64 = modes.iter().map(|c| c[0].abs()).sum();
        let [n0, n1] = grid.n;
        let mut m_top = Vec::with_capacity(grid.slice_cells());
        for i1 in 0..n1 {
            for i0 in 0..n0 {
                let x0 = (i0 as f64 + 0.5) / n0 as f64;
                let x1 = (i1 as f64 + 0.5) / n1 as f64;
                let mut v = 0.0;
                for (j, c) in modes.iter().enumerate() {
                    let q0 = (1 + j) as f64 * (1.0 + c[1].abs());
                    let q1 = if grid.d == 2 {
                        (j as f64 + 1.0) * c[2].abs()
                    } else {
                        0.0
                    };
                    v += c[0] * (std::f64::consts::PI * (q0 * x0 + q1 * x1)).cos();
                }
                m_top.push(m_amplitude * v / total.max(1.0));
            }
        }
        let facets = boundary_facets(&grid);
        let mut g: Vec<f64> = (0..facets.len() * grid.levels())
            .map(|_| flux_amplitude * uniform())
            .collect();
        let boundary_measure: f64 = facets.iter().map(|b| b.measure).sum();
        let mut flux = 0.0;
        for (j, v) in g.iter().enumerate() {
            flux += grid.dz() * facets[j % facets.len()].measure * v;
        }
        let balance = -grid.cell_area() * pairwise_sum(&m_top);
        let shift = (balance - flux) / (grid.field_height() * boundary_measure);
        for v in &mut g {
            *v += shift;
        }
        Self::new(grid, g, vec![0.0; grid.slice_cells()], m_top)
    }

    /// All data multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let mul = |v: &[f64]| v.iter().map(|x| s * x).collect::<Vec<_>>();
        Self::new(
            self.grid,
            mul(&self.g),
            mul(&self.m_bottom),
            mul(&self.m_top),
        )
    }

    /// Grid of the box.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// All flux values, level after level.
    pub fn flux(&self) -> &[f64] {
        &self.g
    }

    /// Outward flux on the boundary facets of level `k`.
    pub fn flux_level(&self, k: usize) -> &[f64] {
        let nb = self.g.len() / self.grid.levels();
        &self.g[k * nb..(k + 1) * nb]
    }

    /// Magnetisation below the bottom face.
    pub fn m_bottom(&self) -> &[f64] {
        &self.m_bottom
    }

    /// Magnetisation above the top face.
    pub fn m_top(&self) -> &[f64] {
        &self.m_top
    }

    /// Height-integrated flux `Σ_k Δz g_k` per boundary facet.
    pub fn cumulated_flux(&self) -> Vec<f64> {
        let nb = self.g.len() / self.grid.levels();
        let dz = self.grid.dz();
        (0..nb)
            .map(|f| {
                let column: Vec<f64> = (0..self.grid.levels())
                    .map(|k| dz * self.g[k * nb + f])
                    .collect();
                pairwise_sum(&column)
            })
            .collect()
    }

    /// Height-averaged flux `ḡ` per boundary facet.
    pub fn mean_flux(&self) -> Vec<f64> {
        let th = self.grid.field_height();
        self.cumulated_flux().into_iter().map(|v| v / th).collect()
    }

    /// Total flux `∫_Γ g` and the magnetisation balance `∫(m^B - m^T)`.
    pub fn flux_balance(&self) -> (f64, f64) {
        let facets = boundary_facets(&self.grid);
        let weighted: Vec<f64> = self
            .cumulated_flux()
            .iter()
            .zip(&facets)
            .map(|(c, b)| c * b.measure)
            .collect();
        let diff: Vec<f64> = self
            .m_bottom
            .iter()
            .zip(&self.m_top)
            .map(|(b, t)| b - t)
            .collect();
        (
            pairwise_sum(&weighted),
            self.grid.cell_area() * pairwise_sum(&diff),
        )
    }

    /// Fails unless `∫_Γ g = ∫(m^B - m^T)` to relative round-off.
    pub fn check_compatible(&self) -> Result<()> {
        let (flux, balance) = self.flux_balance();
        let facets = boundary_facets(&self.grid);
        let nb = facets.len();
        let mut scale = 0.0;
        for (j, v) in self.g.iter().enumerate() {
            scale += self.grid.dz() * facets[j % nb].measure * v.abs();
        }
        for (b, t) in self.m_bottom.iter().zip(&self.m_top) {
            scale += self.grid.cell_area() * (b.abs() + t.abs());
        }
        if (flux - balance).abs() > COMPATIBILITY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(RelaxedError::Incompatible { flux, balance });
        }
        Ok(())
    }

    /// `⨍_Γ (g - ḡ)²`: mean square of the oscillating flux over the
    /// lateral boundary and the field height.
    pub fn oscillation_sq_mean(&self) -> f64 {
        let facets = boundary_facets(&self.grid);
        let nb = facets.len();
        if nb == 0 {
            return 0.0;
        }
        let mean = self.mean_flux();
        let dz = self.grid.dz();
        let terms: Vec<f64> = self
            .g
            .iter()
            .enumerate()
            .map(|(j, v)| dz * facets[j % nb].measure * (v - mean[j % nb]).powi(2))
            .collect();
        let measure: f64 = facets.iter().map(|b| b.measure).sum();
        pairwise_sum(&terms) / (measure * self.grid.field_height())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facets_cover_the_lateral_boundary() {
        let g = GridSpec::new(2, 4, 2, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let f = boundary_facets(&g);
        assert_eq!(f.len(), 16);
        let total: f64 = f.iter().map(|b| b.measure).sum();
        assert!((total - 8.0).abs() < 1e-15);
        let line = GridSpec::new(1, 4, 2, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        assert_eq!(boundary_facets(&line).len(), 2);
    }

    #[test]
    fn incompatible_data_are_rejected() {
        let g = GridSpec::new(1, 4, 2, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let err = BoundaryData::new(g, vec![0.0; 6], vec![0.0; 4], vec![0.5; 4]).unwrap_err();
        assert!(matches!(err, RelaxedError::Incompatible { .. }));
        // Inflow through both ends feeds the top magnetisation.
        let ok = BoundaryData::new(g, vec![-1.0 / 3.0; 6], vec![0.0; 4], vec![0.5; 4]);
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn periodic_grid_is_rejected() {
        let g = GridSpec::new(1, 4, 2, 1.0, 1.0, LateralBc::Periodic).unwrap();
        assert!(matches!(
            BoundaryData::zero(g),
            Err(RelaxedError::InvalidData(_))
        ));
    }

    #[test]
    fn random_data_are_compatible() {
        for d in [1, 2] {
            let g = GridSpec::new(d, 8, 4, 1.0, 0.5, LateralBc::ZeroFlux).unwrap();
            for seed in 0..10 {
                let bd = BoundaryData::random(g, seed, 0.3, 0.8).unwrap();
                assert!(bd.m_top().iter().all(|v| v.abs() <= 0.8));
                assert!(bd.scaled(0.5).is_ok());
            }
        }
    }
}
