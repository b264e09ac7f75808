use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bdop_cli::{run_from_path, CliError, Experiment, EXIT_ERROR, EXIT_FAIL};
use clap::Parser;

/// Run a convergence experiment and write its table as CSV.
#[derive(Debug, Parser)]
#[command(
    name = "bdop",
    version,
    after_help = "Worker threads: BDOP_THREADS (default: all cores).\nExit status: 0 all criteria pass, 1 a criterion failed, 2 config or I/O error."
)]
struct Args {
    experiment: Experiment,
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output` in the config. Stdout when neither is set.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Monte Carlo seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let start = Instant::now();
    match execute(&args, start) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("bdop: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn execute(args: &Args, start: Instant) -> Result<bool, CliError> {
    let (cfg, report) = run_from_path(args.experiment, &args.config, args.seed)?;
    let csv = report.to_csv();
    match args.output.as_ref().or(cfg.output.as_ref()) {
        Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{csv}"),
    }
    eprintln!("{}", report.summary(start.elapsed().as_secs_f64()));
    Ok(report.all_pass())
}
