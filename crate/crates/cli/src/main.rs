use std::process::ExitCode;

use clap::Parser;
use fastscc_cli::{run, Args, CliError, RunConfig, THREADS_ENV};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    fastscc::exec::configure_threads(threads);
    Ok(())
}

fn main_inner(args: &Args) -> Result<(), CliError> {
    configure_threads()?;
    let config = RunConfig::from_args(args)?;
    let text = run(&config)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError {
            category: fastscc::ErrorCategory::Data,
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fastscc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
