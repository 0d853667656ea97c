use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use decoupled_cli::{emit_csv, run_study, CliError, ExperimentConfig, Study};

/// Local large-deviation studies for decoupled renewal processes.
///
/// Each study reads optional overrides from a TOML file and writes a CSV
/// table with a `#` metadata line. Exit codes: 0 ok, 1 configuration or
/// hypothesis error, 2 numerical failure or exhausted time budget.
#[derive(Debug, Parser)]
#[command(name = "ldd", version)]
struct Cli {
    /// Study to run.
    #[arg(value_enum)]
    study: Study,

    /// TOML file overriding the study defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV; defaults to `<study>.csv`.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Seed for the sampling studies.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads; 0 uses one per logical core.
    #[arg(long, value_name = "N", default_value_t = 0)]
    threads: usize,

    /// Wall-clock budget; grid points not started in time are skipped.
    #[arg(long, value_name = "N")]
    budget_seconds: Option<u64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(cli.study, path)?,
        None => ExperimentConfig::defaults(cli.study),
    };
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let outcome = run_study(
        &cfg,
        cli.threads,
        cli.budget_seconds.map(Duration::from_secs),
    )?;
    emit_csv(&outcome.table, &cfg.out)?;
    for (k, v) in &outcome.table.metadata {
        if k == "residual_log_log_slope" {
            println!("fitted log-log slope of |residual|: {v}");
        }
    }
    println!(
        "{}: wrote {} rows to {}",
        cfg.study,
        outcome.table.rows.len(),
        cfg.out.display()
    );
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ldd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
