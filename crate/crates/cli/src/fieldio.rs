//! Text files for magnetisations and stray fields.
//!
//! A file starts with `key=value` header lines: `version`, `kind`
//! (`magnetisation` or `stray-field`), `d`, `n_h`, `n_v`, `L`, `T`, `bc`
//! and, for magnetisations, `mode`. One blank line separates the header
//! from the values, which are whitespace-separated decimals printed in
//! shortest round-trip form. Magnetisations list one row of cells per line,
//! slice after slice from the bottom. Stray fields list, level after level
//! from the bottom, one line per component.

use branchlab_core::{GridSpec, LateralBc, Magnetisation, Mode, StrayField};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Version written by this build and the only one it reads.
pub const FORMAT_VERSION: u32 = 1;

/// Failures of reading or writing field files.
#[derive(Debug, Error)]
pub enum FieldFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed field file: {0}")]
    Malformed(String),
    #[error("field file version {found}, expected version {expected}")]
    Version { expected: u32, found: String },
    #[error("field file holds a {found}, expected a {expected}")]
    Kind {
        expected: &'static str,
        found: String,
    },
    #[error("field does not live on a full slab grid: {0}")]
    Grid(String),
}

type Result<T> = std::result::Result<T, FieldFileError>;

const KIND_M: &str = "magnetisation";
const KIND_H: &str = "stray-field";

fn check_slab(g: &GridSpec) -> Result<()> {
    let full = GridSpec::new(g.d, g.n[0], g.n_v, g.half[0], g.height, g.bc[0])
        .map_err(|e| FieldFileError::Grid(e.to_string()))?;
    if full != *g {
        return Err(FieldFileError::Grid(format!("{g:?}")));
    }
    Ok(())
}

fn header(g: &GridSpec, kind: &str, mode: Option<Mode>) -> String {
    let mut s = format!(
        "version={FORMAT_VERSION}\nkind={kind}\nd={}\nn_h={}\nn_v={}\nL={}\nT={}\nbc={}\n",
        g.d,
        g.n[0],
        g.n_v,
        g.half[0],
        g.height,
        g.bc[0].name()
    );
    if let Some(m) = mode {
        let _ = writeln!(s, "mode={}", m.name());
    }
    s.push('\n');
    s
}

fn push_line(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:?}");
    }
    out.push('\n');
}

/// Text of a magnetisation file.
pub fn magnetisation_to_string(m: &Magnetisation) -> Result<String> {
    let g = m.grid();
    check_slab(g)?;
    let mut out = header(g, KIND_M, Some(m.mode()));
    for row in m.values().chunks(g.n[0]) {
        push_line(&mut out, row);
    }
    Ok(out)
}

/// Text of a stray-field file.
pub fn stray_field_to_string(h: &StrayField) -> Result<String> {
    let g = h.grid();
    check_slab(g)?;
    let mut out = header(g, KIND_H, None);
    for k in 0..g.levels() {
        for comp in h.level(k) {
            push_line(&mut out, comp);
        }
    }
    Ok(out)
}

struct Parsed<'a> {
    grid: GridSpec,
    keys: BTreeMap<&'a str, &'a str>,
    values: Vec<f64>,
}

fn parse<'a>(text: &'a str, expected: &'static str) -> Result<Parsed<'a>> {
    let (head, body) = text
        .split_once("\n\n")
        .ok_or_else(|| FieldFileError::Malformed("no blank line after the header".into()))?;
    let mut keys = BTreeMap::new();
    for line in head.lines() {
        let (k, v) = line.split_once('=').ok_or_else(|| {
            FieldFileError::Malformed(format!("header line {line:?} is not key=value"))
        })?;
        keys.insert(k.trim(), v.trim());
    }
    let get = |k: &str| {
        keys.get(k)
            .copied()
            .ok_or_else(|| FieldFileError::Malformed(format!("missing header key {k}")))
    };
    let version = get("version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(FieldFileError::Version {
            expected: FORMAT_VERSION,
            found: version.to_string(),
        });
    }
    let kind = get("kind")?;
    if kind != expected {
        return Err(FieldFileError::Kind {
            expected,
            found: kind.to_string(),
        });
    }
    fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| FieldFileError::Malformed(format!("header {k}={v} is not a number")))
    }
    let d: usize = num("d", get("d")?)?;
    let n_h: usize = num("n_h", get("n_h")?)?;
    let n_v: usize = num("n_v", get("n_v")?)?;
    let l: f64 = num("L", get("L")?)?;
    let t: f64 = num("T", get("T")?)?;
    let bc_name = get("bc")?;
    let bc = LateralBc::parse(bc_name)
        .ok_or_else(|| FieldFileError::Malformed(format!("unknown bc {bc_name}")))?;
    let grid = GridSpec::new(d, n_h, n_v, l, t, bc)
        .map_err(|e| FieldFileError::Malformed(e.to_string()))?;
    let values = body
        .split_whitespace()
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| FieldFileError::Malformed(format!("value {w:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Parsed { grid, keys, values })
}

/// Parses a magnetisation file.
pub fn magnetisation_from_str(text: &str) -> Result<Magnetisation> {
    let p = parse(text, KIND_M)?;
    let name = p
        .keys
        .get("mode")
        .copied()
        .ok_or_else(|| FieldFileError::Malformed("missing header key mode".into()))?;
    let mode = Mode::parse(name)
        .ok_or_else(|| FieldFileError::Malformed(format!("unknown mode {name}")))?;
    if p.values.len() != p.grid.cells() {
        return Err(FieldFileError::Malformed(format!(
            "{} values, expected {}",
            p.values.len(),
            p.grid.cells()
        )));
    }
    Magnetisation::new(p.grid, p.values, mode).map_err(|e| FieldFileError::Malformed(e.to_string()))
}

/// Parses a stray-field file.
pub fn stray_field_from_str(text: &str) -> Result<StrayField> {
    let p = parse(text, KIND_H)?;
    let zeros = StrayField::zeros(p.grid);
    let [n0, n1] = [
        zeros.comps()[0].len() / p.grid.levels(),
        zeros.comps()[1].len() / p.grid.levels(),
    ];
    if p.values.len() != (n0 + n1) * p.grid.levels() {
        return Err(FieldFileError::Malformed(format!(
            "{} values, expected {}",
            p.values.len(),
            (n0 + n1) * p.grid.levels()
        )));
    }
    let mut comps = [
        Vec::with_capacity(n0 * p.grid.levels()),
        Vec::with_capacity(n1 * p.grid.levels()),
    ];
    for level in p.values.chunks(n0 + n1) {
        comps[0].extend_from_slice(&level[..n0]);
        comps[1].extend_from_slice(&level[n0..]);
    }
    StrayField::from_parts(p.grid, comps).map_err(|e| FieldFileError::Malformed(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FieldFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| FieldFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_magnetisation(path: &Path, m: &Magnetisation) -> Result<()> {
    write(path, &magnetisation_to_string(m)?)
}

pub fn load_magnetisation(path: &Path) -> Result<Magnetisation> {
    magnetisation_from_str(&read(path)?)
}

pub fn save_stray_field(path: &Path, h: &StrayField) -> Result<()> {
    write(path, &stray_field_to_string(h)?)
}

pub fn load_stray_field(path: &Path) -> Result<StrayField> {
    stray_field_from_str(&read(path)?)
}
