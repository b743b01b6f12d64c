//! Command-line flags and their validation.

use crate::CliError;
use branchlab_core::{Anchor, LateralBc};
use branchlab_minimize::MoveSet;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Validated configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(
    name = "branchlab",
    version,
    about = "Branching patterns in uniaxial ferromagnets: constructions, bounds and checks"
)]
pub struct RunConfig {
    /// Worker threads (default: all cores, or BRANCHLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Build the branching competitor and write its field and block manifest.
    Construct(ConstructArgs),
    /// Evaluate the energy of a magnetisation file.
    Energy(EnergyArgs),
    /// Competitor energy density across slab heights.
    Sweep(SweepArgs),
    /// Local quantities on a ladder of shrinking boxes.
    Probe(ProbeArgs),
    /// Relaxed competitor with seeded lateral boundary data.
    Relax(RelaxArgs),
    /// Anneal a sharp magnetisation.
    Minimize(MinimizeArgs),
    /// Run every invariant suite on small grids.
    Verify(VerifyArgs),
}

/// Slab geometry and discretisation.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct GridArgs {
    /// Number of horizontal dimensions.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub d: u8,
    /// Half-width of the slab.
    #[arg(long = "L")]
    pub l: f64,
    /// Height of the slab.
    #[arg(long = "T")]
    pub t: f64,
    /// Cells per horizontal axis (a power of two).
    #[arg(long)]
    pub nh: usize,
    /// Number of slices.
    #[arg(long)]
    pub nv: usize,
    /// Lateral boundary condition: zero-flux or periodic.
    #[arg(long, default_value = "zero-flux", value_parser = parse_bc)]
    pub bc: LateralBc,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Refinement levels.
    #[arg(long)]
    pub levels: usize,
    /// Top-level blocks per axis (default: the energy-balancing count).
    #[arg(long = "N")]
    pub n_blocks: Option<usize>,
    /// Interface energy density.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Also write the minimal stray field.
    #[arg(long)]
    pub save_field: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct EnergyArgs {
    /// Magnetisation file.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Directory for energy.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub d: u8,
    /// Slab heights, comma-separated.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub heights: Vec<f64>,
    /// Coupling `L = c·T^{2/3}`.
    #[arg(long = "c-lt", default_value_t = 4.0)]
    pub c_lt: f64,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value = "zero-flux", value_parser = parse_bc)]
    pub bc: LateralBc,
    #[arg(long, default_value_t = 1024)]
    pub nh: usize,
    #[arg(long, default_value_t = 256)]
    pub nv: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ProbeArgs {
    /// Magnetisation file.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Lateral centre, comma-separated (one entry per dimension).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub a: Vec<f64>,
    /// Face the boxes touch: bottom or top.
    #[arg(long, default_value = "bottom", value_parser = parse_anchor)]
    pub anchor: Anchor,
    /// Half-width of the outermost box.
    #[arg(long)]
    pub half: f64,
    /// Height of the outermost box.
    #[arg(long)]
    pub height: f64,
    /// Ratio of consecutive half-widths.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Number of refinements after the outermost box.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RelaxArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Seed of the boundary data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Layer width in cells (default: an eighth of the cells).
    #[arg(long)]
    pub r: Option<usize>,
    /// Layer-size ratio the seeded data are scaled to.
    #[arg(long, default_value_t = 2.0)]
    pub target: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct MinimizeArgs {
    /// Sharp starting magnetisation with zero slice means.
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Initial inverse temperature (`inf` for greedy descent).
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    /// Geometric cooling rate in (0, 1].
    #[arg(long, default_value_t = 0.999)]
    pub rate: f64,
    /// Move set: single-flip or column-swap.
    #[arg(long, default_value = "single-flip", value_parser = parse_moves)]
    pub moves: MoveSet,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct VerifyArgs {
    /// Number of seeds per randomised suite.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
}

fn parse_bc(s: &str) -> Result<LateralBc, String> {
    match LateralBc::parse(s) {
        Some(LateralBc::Free) | None => Err(format!("{s:?} is not one of zero-flux, periodic")),
        Some(bc) => Ok(bc),
    }
}

fn parse_anchor(s: &str) -> Result<Anchor, String> {
    match s {
        "bottom" => Ok(Anchor::Bottom),
        "top" => Ok(Anchor::Top),
        _ => Err(format!("{s:?} is not one of bottom, top")),
    }
}

fn parse_moves(s: &str) -> Result<MoveSet, String> {
    MoveSet::parse(s).ok_or_else(|| format!("{s:?} is not one of single-flip, column-swap"))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} = {v} must be positive and finite"
        )))
    }
}

fn power_of_two(name: &str, n: usize) -> Result<(), CliError> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} = {n} must be a power of two ≥ 2"
        )))
    }
}

fn at_least(name: &str, v: usize, lo: usize) -> Result<(), CliError> {
    if v >= lo {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{name} = {v} must be at least {lo}"
        )))
    }
}

impl GridArgs {
    fn validate(&self) -> Result<(), CliError> {
        positive("L", self.l)?;
        positive("T", self.t)?;
        power_of_two("nh", self.nh)?;
        at_least("nv", self.nv, 1)
    }
}

impl RunConfig {
    /// Checks the module preconditions that do not need any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.threads {
            at_least("threads", t, 1)?;
        }
        match &self.command {
            Command::Construct(a) => {
                a.grid.validate()?;
                at_least("levels", a.levels, 1)?;
                if let Some(n) = a.n_blocks {
                    at_least("N", n, 1)?;
                }
                positive("sigma", a.sigma)
            }
            Command::Energy(a) => positive("sigma", a.sigma),
            Command::Sweep(a) => {
                for &t in &a.heights {
                    positive("T", t)?;
                }
                positive("c-lt", a.c_lt)?;
                at_least("levels", a.levels, 1)?;
                positive("sigma", a.sigma)?;
                power_of_two("nh", a.nh)?;
                at_least("nv", a.nv, 1)
            }
            Command::Probe(a) => {
                positive("half", a.half)?;
                positive("height", a.height)?;
                positive("sigma", a.sigma)?;
                if !(a.theta > 0.0 && a.theta < 1.0) {
                    return Err(CliError::Validation(format!(
                        "theta = {} must lie in (0, 1)",
                        a.theta
                    )));
                }
                if a.a.is_empty() || a.a.len() > 2 || a.a.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::Validation(
                        "a needs one or two finite coordinates".into(),
                    ));
                }
                Ok(())
            }
            Command::Relax(a) => {
                a.grid.validate()?;
                if a.grid.bc != LateralBc::ZeroFlux {
                    return Err(CliError::Validation("relax needs zero-flux sides".into()));
                }
                if let Some(r) = a.r {
                    at_least("r", r, 1)?;
                }
                positive("target", a.target)
            }
            Command::Minimize(a) => {
                positive("sigma", a.sigma)?;
                at_least("steps", a.steps, 1)?;
                if !(a.beta0 > 0.0) {
                    return Err(CliError::Validation(format!(
                        "beta0 = {} must be positive",
                        a.beta0
                    )));
                }
                if !(a.rate > 0.0 && a.rate <= 1.0) {
                    return Err(CliError::Validation(format!(
                        "rate = {} must lie in (0, 1]",
                        a.rate
                    )));
                }
                Ok(())
            }
            Command::Verify(a) => at_least("seeds", a.seeds as usize, 1),
        }
    }
}

/// Parses and validates `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = RunConfig::try_parse_from(argv).map_err(CliError::Usage)?;
    cfg.validate()?;
    Ok(cfg)
}
