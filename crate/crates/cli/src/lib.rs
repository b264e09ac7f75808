//! Experiment runner for the `bdop` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
pub use report::ExperimentReport;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BDOP_THREADS";

/// Exit status for a run that could not be carried out.
pub const EXIT_ERROR: u8 = 2;
/// Exit status when a criterion failed.
pub const EXIT_FAIL: u8 = 1;

/// Reads the config and runs the experiment on a pool sized by [`THREADS_ENV`].
pub fn run_from_path(
    experiment: Experiment,
    config: &std::path::Path,
    seed: Option<u64>,
) -> Result<(ExperimentConfig, ExperimentReport), CliError> {
    let text = std::fs::read_to_string(config).map_err(|source| CliError::Io {
        path: config.to_path_buf(),
        source,
    })?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Config {
            line: None,
            msg: format!("{THREADS_ENV} = '{v}' is not a thread count"),
        })?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))?;
    let report = pool.install(|| experiments::run(experiment, &cfg))?;
    Ok((cfg, report))
}
