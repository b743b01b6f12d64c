//! Scaling sweeps of the branching competitor over the slab height.

use crate::chain::chain_of;
use crate::{BoundsError, Result};
use branchlab_construction::{choose_n_sigma, periodic_branching, zero_branching, BranchingConfig};
use branchlab_core::{GridSpec, LateralBc};
use branchlab_energy::{total_energy, EnergyBreakdown};

/// Column header of the sweep table.
pub const SWEEP_HEADER: &str = "T,L,N,K,interfacial,stray,total,density,chain_lb";

/// Parameters of a sweep over heights `T` with `L = c_lt T^{2/3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub d: usize,
    pub heights: Vec<f64>,
    pub c_lt: f64,
    pub levels: usize,
    pub sigma: f64,
    pub bc: LateralBc,
    /// Cells per horizontal axis (a power of two).
    pub n_h: usize,
    /// Slices.
    pub n_v: usize,
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub l: f64,
    pub n_blocks: usize,
    pub levels: usize,
    pub interfacial: f64,
    pub stray: f64,
    pub total: f64,
    pub density: f64,
    /// Value of the lower-bound chain of the competitor.
    pub chain_lb: f64,
}

impl SweepRow {
    /// The row in the column order of [`SWEEP_HEADER`].
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.t,
            self.l,
            self.n_blocks,
            self.levels,
            self.interfacial,
            self.stray,
            self.total,
            self.density,
            self.chain_lb
        )
    }
}

/// Table and fitted slope of `log(density)` against `log(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Unweighted least-squares slope; `None` with fewer than three rows.
    pub slope: Option<f64>,
}

impl SweepResult {
    /// The table with header, one line per row.
    pub fn csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }
}

/// Least-squares slope of `y` against `x`; `None` for fewer than three
/// points or constant `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Competitor energy and chain value for one slab.
pub fn competitor_row(d: usize, t: f64, l: f64, cfg: &SweepConfig) -> Result<SweepRow> {
    let n_blocks = choose_n_sigma(l, t, cfg.sigma);
    let bcfg = BranchingConfig {
        n_blocks,
        levels: cfg.levels,
    };
    let grid = GridSpec::new(d, cfg.n_h, cfg.n_v, l, t, cfg.bc)?;
    let (m, energy): (_, EnergyBreakdown) = match cfg.bc {
        LateralBc::ZeroFlux => {
            let b = zero_branching(&grid, &bcfg)?;
            let e = b.report.energy(cfg.sigma);
            (b.m, e)
        }
        LateralBc::Periodic => {
            let (m, _) = periodic_branching(&grid, &bcfg)?;
            let e = total_energy(&m, cfg.sigma)?;
            (m, e)
        }
        LateralBc::Free => {
            return Err(BoundsError::Invalid(
                "sweeps need periodic or zero-flux sides".into(),
            ))
        }
    };
    let chain = chain_of(&m, cfg.sigma)?;
    Ok(SweepRow {
        t,
        l,
        n_blocks,
        levels: cfg.levels,
        interfacial: energy.interfacial,
        stray: energy.stray,
        total: energy.total,
        density: energy.density,
        chain_lb: chain.value,
    })
}

/// Builds the competitor for every height (in the given order) and fits
/// the density slope.
pub fn scaling_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.heights.is_empty() {
        return Err(BoundsError::Invalid("empty list of heights".into()));
    }
    if let Some(t) = cfg.heights.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(BoundsError::Invalid(format!("height {t}")));
    }
    // Rows run one after another: a single competitor can fill most of
    // the memory, and each row is parallel inside.
    let rows = cfg
        .heights
        .iter()
        .map(|&t| competitor_row(cfg.d, t, cfg.c_lt * t.powf(2.0 / 3.0), cfg))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.density.ln()).collect();
    Ok(SweepResult {
        slope: fit_slope(&x, &y),
        rows,
    })
}
