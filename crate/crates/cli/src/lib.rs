//! Experiment runner for the `fockwalk` library: config parsing, parallel
//! sweeps and deterministic CSV/JSON output.

pub mod angle;
pub mod config;
pub mod run;
pub mod table;

pub use angle::{parse_angle, AngleError};
pub use config::{parse_config, ConfigError, Experiment, ExperimentConfig, Kind};
pub use run::{run, Output, RunError};
pub use table::{Cell, Table};

use std::path::Path;

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs a validated config on a pool of `threads` workers (all cores if
/// `None`) and writes its outputs. Without an `out` path the CSV is returned.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Output, Option<String>), RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Invariant(format!("cannot start worker pool: {e}")))?;
    let output = pool.install(|| run(&config.experiment))?;
    let csv = output.table.to_csv();
    if let Some(p) = &config.json {
        write(p, &output.table.to_json())?;
    }
    let stdout = match &config.out {
        Some(p) => {
            write(p, &csv)?;
            None
        }
        None => Some(csv),
    };
    Ok((output, stdout))
}
