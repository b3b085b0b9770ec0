use std::io;
use std::process::ExitCode;

use anharm_cli::{parse_config, run, Cli, CliError};
use clap::Parser;

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("ANHARM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("ANHARM_THREADS: expected a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn main_inner() -> Result<(), CliError> {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let cfg = parse_config(cli)?;
    if let Some(n) = thread_count(cfg.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let stdout = io::stdout();
    run(&cfg, &mut stdout.lock())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
