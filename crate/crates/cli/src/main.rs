use branchlab_cli::{parse_args, run, thread_count, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = match execute() {
        Ok(()) => 0,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            CliError::Usage(e).exit_code()
        }
        Err(e) => {
            eprintln!("status=error code={} message={e}", e.exit_code());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn execute() -> Result<(), CliError> {
    let cfg = parse_args(std::env::args_os())?;
    if let Some(n) = thread_count(cfg.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let stdout = std::io::stdout();
    run(&cfg, &mut stdout.lock())
}
