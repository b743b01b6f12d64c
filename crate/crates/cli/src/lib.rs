//! Command-line front end: flag parsing, field files and the subcommands.

pub mod args;
pub mod fieldio;
pub mod run;
pub mod verify;

pub use args::{parse_args, Command, RunConfig};
pub use fieldio::{
    load_magnetisation, load_stray_field, save_magnetisation, save_stray_field, FieldFileError,
    FORMAT_VERSION,
};
pub use run::run;

use thiserror::Error;

/// Failures of one invocation, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unknown flag or unparsable value.
    #[error("{0}")]
    Usage(clap::Error),
    /// A parameter or input violates a precondition.
    #[error("invalid input: {0}")]
    Validation(String),
    /// A numerical check failed.
    #[error("check failed: {0}")]
    Check(String),
    /// Reading or writing a file failed.
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    /// 1 for usage and validation errors, 2 for failed checks, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) | CliError::Validation(_) => 1,
            CliError::Check(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<FieldFileError> for CliError {
    fn from(e: FieldFileError) -> Self {
        match e {
            FieldFileError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}

validation_from!(
    branchlab_core::CoreError,
    branchlab_energy::EnergyError,
    branchlab_construction::ConstructionError,
    branchlab_bounds::BoundsError,
    branchlab_relaxed::RelaxedError,
    branchlab_minimize::MinimizeError
);

/// Worker count from `--threads`, else from `BRANCHLAB_THREADS`.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("BRANCHLAB_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!(
                "BRANCHLAB_THREADS = {v:?} must be a positive integer"
            ))),
        },
        _ => Ok(None),
    }
}
