//! Execution of the subcommands.

use crate::args::{
    Command, ConstructArgs, EnergyArgs, MinimizeArgs, ProbeArgs, RelaxArgs, RunConfig, SweepArgs,
};
use crate::fieldio::{load_magnetisation, save_magnetisation, save_stray_field};
use crate::{verify, CliError};
use branchlab_bounds::{chain_of, local_probe_minimal, scaling_sweep, ProbeConfig, SweepConfig};
use branchlab_construction::{
    choose_n_sigma, periodic_branching, write_manifest, zero_branching, BranchingConfig,
};
use branchlab_core::{check_admissibility, GridSpec, LateralBc};
use branchlab_energy::{minimal_stray_field, total_energy, EnergyBreakdown};
use branchlab_minimize::{anneal, AnnealConfig};
use branchlab_relaxed::{conditioned_data, relaxed_competitor, LAYER_CONSTANT};
use std::fmt::Display;
use std::io::Write;
use std::path::Path;

/// Residual bound for constructed pairs.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Ordered `key=value` pairs of the summary line.
#[derive(Debug, Default)]
pub struct Summary(Vec<(String, String)>);

impl Summary {
    fn new(command: &str) -> Self {
        let mut s = Self::default();
        s.push("command", command);
        s
    }

    fn push<V: Display>(&mut self, key: &str, value: V) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn energy(&mut self, e: &EnergyBreakdown) {
        self.push("interfacial", e.interfacial);
        self.push("stray", e.stray);
        self.push("total", e.total);
        self.push("density", e.density);
    }

    /// `status=ok key=value…`.
    pub fn line(&self) -> String {
        let mut out = String::from("status=ok");
        for (k, v) in &self.0 {
            out.push_str(&format!(" {k}={v}"));
        }
        out
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Runs one validated command, writing tables and the summary line to
/// `out`.
pub fn run<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let summary = match &cfg.command {
        Command::Construct(a) => construct(a)?,
        Command::Energy(a) => energy(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::Probe(a) => probe(a)?,
        Command::Relax(a) => relax(a)?,
        Command::Minimize(a) => minimize(a)?,
        Command::Verify(a) => {
            let results = verify::run_suites(a.seeds);
            let table = verify::table(&results);
            out.write_all(table.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.name)
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Check(format!(
                    "failed suites: {}",
                    failed.join(",")
                )));
            }
            let mut s = Summary::new("verify");
            s.push("suites", results.len());
            s
        }
    };
    writeln!(out, "{}", summary.line()).map_err(|e| CliError::Io(e.to_string()))
}

fn construct(a: &ConstructArgs) -> Result<Summary, CliError> {
    let g = &a.grid;
    let grid = GridSpec::new(g.d as usize, g.nh, g.nv, g.l, g.t, g.bc)?;
    let n_blocks = a
        .n_blocks
        .unwrap_or_else(|| choose_n_sigma(g.l, g.t, a.sigma));
    let bcfg = BranchingConfig {
        n_blocks,
        levels: a.levels,
    };
    let (m, blocks) = match g.bc {
        LateralBc::Periodic => (periodic_branching(&grid, &bcfg)?.0, Vec::new()),
        _ => {
            let b = zero_branching(&grid, &bcfg)?;
            (b.m, b.blocks)
        }
    };
    let e = total_energy(&m, a.sigma)?;
    let chain = chain_of(&m, a.sigma)?;
    create_dir(&a.out)?;
    save_magnetisation(&a.out.join("m.field"), &m)?;
    let manifest = a.out.join("manifest.jsonl");
    let file = std::fs::File::create(&manifest).map_err(|e| io_err(&manifest, e))?;
    write_manifest(&blocks, std::io::BufWriter::new(file)).map_err(|e| io_err(&manifest, e))?;
    let mut s = Summary::new("construct");
    s.push("N", n_blocks);
    s.push("K", a.levels);
    s.push("blocks", blocks.len());
    s.energy(&e);
    s.push("chain_lb", chain.value);
    if a.save_field {
        let h = minimal_stray_field(&m)?;
        let report = check_admissibility(&m, &h, RESIDUAL_TOL)?;
        save_stray_field(&a.out.join("h.field"), &h)?;
        s.push("residual", report.max_residual);
        if !report.passed {
            return Err(CliError::Check(format!(
                "divergence residual {}",
                report.max_residual
            )));
        }
    }
    Ok(s)
}

fn energy(a: &EnergyArgs) -> Result<Summary, CliError> {
    let m = load_magnetisation(&a.field)?;
    let e = total_energy(&m, a.sigma)?;
    let g = m.grid();
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let text = format!(
            "L,T,interfacial,stray,total,density\n{},{},{},{},{},{}\n",
            g.half[0], g.height, e.interfacial, e.stray, e.total, e.density
        );
        write_file(&dir.join("energy.csv"), &text)?;
    }
    let mut s = Summary::new("energy");
    s.energy(&e);
    Ok(s)
}

fn sweep(a: &SweepArgs) -> Result<Summary, CliError> {
    let cfg = SweepConfig {
        d: a.d as usize,
        heights: a.heights.clone(),
        c_lt: a.c_lt,
        levels: a.levels,
        sigma: a.sigma,
        bc: a.bc,
        n_h: a.nh,
        n_v: a.nv,
    };
    let r = scaling_sweep(&cfg)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("sweep.csv"), &r.csv())?;
    let mut s = Summary::new("sweep");
    s.push("rows", r.rows.len());
    match r.slope {
        Some(v) => s.push("slope", v),
        None => s.push("slope", "none"),
    }
    Ok(s)
}

fn probe(a: &ProbeArgs) -> Result<Summary, CliError> {
    let m = load_magnetisation(&a.field)?;
    let d = m.grid().d;
    if a.a.len() != d {
        return Err(CliError::Validation(format!(
            "a has {} coordinates, the field has d = {d}",
            a.a.len()
        )));
    }
    let centre = [a.a[0], a.a.get(1).copied().unwrap_or(0.0)];
    let cfg = ProbeConfig {
        a: centre,
        anchor: a.anchor,
        half: a.half,
        height: a.height,
        theta: a.theta,
        depth: a.depth,
        sigma: a.sigma,
    };
    let r = local_probe_minimal(&m, &cfg)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("probe.csv"), &r.csv())?;
    let mut s = Summary::new("probe");
    s.push("rungs", r.rungs.len());
    s.push("f_constant", r.f_constant);
    s.push("n_max", r.n_max);
    Ok(s)
}

fn relax(a: &RelaxArgs) -> Result<Summary, CliError> {
    let g = &a.grid;
    let grid = GridSpec::new(g.d as usize, g.nh, g.nv, g.l, g.t, g.bc)?;
    let r = a.r.unwrap_or((g.nh / 8).max(1));
    let bd = conditioned_data(&grid, a.seed, r, a.target * LAYER_CONSTANT)?;
    let c = relaxed_competitor(&bd, r, LAYER_CONSTANT)?;
    create_dir(&a.out)?;
    save_magnetisation(&a.out.join("m.field"), &c.m)?;
    save_stray_field(&a.out.join("h.field"), &c.h)?;
    let mut s = Summary::new("relax");
    s.push("r_cells", r);
    s.push("residual", c.residual);
    s.push("max_lambda", c.layer.report.max_lambda);
    s.push("field_ratio", c.layer.report.field_ratio);
    s.push("slope_ratio", c.layer.report.slope_ratio);
    if !(c.residual <= RESIDUAL_TOL) {
        return Err(CliError::Check(format!("relaxed residual {}", c.residual)));
    }
    Ok(s)
}

fn minimize(a: &MinimizeArgs) -> Result<Summary, CliError> {
    let m = load_magnetisation(&a.field)?;
    let cfg = AnnealConfig {
        seed: a.seed,
        steps: a.steps,
        beta0: a.beta0,
        rate: a.rate,
        moves: a.moves,
    };
    let r = anneal(&m, a.sigma, &cfg)?;
    let chain = chain_of(&r.best, a.sigma)?;
    create_dir(&a.out)?;
    save_magnetisation(&a.out.join("m.field"), &r.best)?;
    write_file(&a.out.join("trace.csv"), &r.trace_csv())?;
    let mut s = Summary::new("minimize");
    s.push("initial", r.initial_energy);
    s.push("energy", r.energy);
    s.push("accepted", r.accepted);
    s.push("chain_lb", chain.value);
    if chain.value > r.energy * (1.0 + 1e-12) {
        return Err(CliError::Check(format!(
            "chain {} above the annealed energy {}",
            chain.value, r.energy
        )));
    }
    Ok(s)
}
