//! Local quantities `f`, `n` and `e` along aspect-preserving ladders of
//! boxes at the top or bottom face.

use crate::{BoundsError, Result};
use branchlab_core::{Anchor, Magnetisation, StrayField, SubCuboid};
use branchlab_energy::{local_stats, local_stats_box, minimal_stray_field_in, LocalStats};

/// Column header of the probe table.
pub const PROBE_HEADER: &str = "k,l,t,f,f0,n,e";

/// Ladder `ℓ_k = θ^k ℓ₀`, `t_k = θ^{3k/2} t₀`, `k = 0..=depth`, centred at
/// `a` and attached to one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub a: [f64; 2],
    pub anchor: Anchor,
    pub half: f64,
    pub height: f64,
    pub theta: f64,
    pub depth: usize,
    pub sigma: f64,
}

impl ProbeConfig {
    /// Box of rung `k`.
    pub fn rung(&self, k: usize) -> SubCuboid {
        let l = self.half * self.theta.powi(k as i32);
        let t = self.height * self.theta.powf(1.5 * k as f64);
        SubCuboid {
            a: self.a,
            anchor: self.anchor,
            half: l,
            height: t,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(BoundsError::Invalid(format!(
                "ladder ratio {} outside (0, 1)",
                self.theta
            )));
        }
        Ok(())
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRung {
    pub k: usize,
    pub stats: LocalStats,
}

/// The ladder with its summary constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub rungs: Vec<ProbeRung>,
    /// `max_k f_k / (f_0 + t₀^{4/3}/ℓ₀²)`: boundedness of `f` relative to
    /// the outermost box.
    pub f_constant: f64,
    /// `max_k n_k`.
    pub n_max: f64,
}

impl ProbeReport {
    fn new(rungs: Vec<ProbeRung>) -> Self {
        let first = rungs[0].stats;
        let reference = first.f + first.height.powf(4.0 / 3.0) / first.half.powi(2);
        let f_max = rungs.iter().map(|r| r.stats.f).fold(0.0, f64::max);
        let f_constant = if reference > 0.0 {
            f_max / reference
        } else {
            0.0
        };
        let n_max = rungs.iter().map(|r| r.stats.n).fold(0.0, f64::max);
        Self {
            rungs,
            f_constant,
            n_max,
        }
    }

    /// Rungs whose `f` exceeds `bound` times the reference of the
    /// outermost box.
    pub fn violations(&self, bound: f64) -> Vec<usize> {
        let first = self.rungs[0].stats;
        let reference = first.f + first.height.powf(4.0 / 3.0) / first.half.powi(2);
        self.rungs
            .iter()
            .filter(|r| r.stats.f > bound * reference)
            .map(|r| r.k)
            .collect()
    }

    /// The table with header, one line per rung.
    pub fn csv(&self) -> String {
        let mut out = String::from(PROBE_HEADER);
        out.push('\n');
        for r in &self.rungs {
            let s = r.stats;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k, s.half, s.height, s.f, s.f0, s.n, s.e
            ));
        }
        out
    }
}

/// Ladder of local quantities using the given field.
pub fn local_probe(m: &Magnetisation, h: &StrayField, cfg: &ProbeConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let rungs = (0..=cfg.depth)
        .map(|k| {
            Ok(ProbeRung {
                k,
                stats: local_stats(m, h, &cfg.rung(k), cfg.sigma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport::new(rungs))
}

/// Ladder of local quantities with the minimal stray field of `m`, solved
/// only on the levels each box needs.
pub fn local_probe_minimal(m: &Magnetisation, cfg: &ProbeConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let rungs = (0..=cfg.depth)
        .map(|k| {
            let cb = cfg.rung(k).to_cells(m.grid())?;
            let h_box = minimal_stray_field_in(m, &cb)?;
            Ok(ProbeRung {
                k,
                stats: local_stats_box(m, &h_box, &cb, cfg.sigma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport::new(rungs))
}
