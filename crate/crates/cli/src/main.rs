use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fockwalk_cli::{parse_config, run_experiment, ConfigError, ExperimentConfig, RunError};

/// Runs a walk experiment and writes its table as CSV.
///
/// Settings are `key=value` pairs; a bare word names the experiment kind
/// (walk, sweep, quench, ramp, eigen, pulse-verify, phase-diagram).
/// Angles accept multiples of pi such as `pi/2` or `-2pi/3`.
#[derive(Parser, Debug)]
#[command(name = "fockwalk", version)]
struct Args {
    /// Experiment kind and key=value settings.
    settings: Vec<String>,
    /// Config file with one `key = value` per line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON mirror output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn collect(args: &Args) -> Result<ExperimentConfig, RunError> {
    let mut pairs = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
        pairs.extend(parse_config(&text)?);
    }
    for s in &args.settings {
        match s.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None => pairs.push(("kind".to_string(), s.clone())),
        }
    }
    if let Some(n) = args.threads {
        pairs.push(("threads".into(), n.to_string()));
    }
    if let Some(p) = &args.out {
        pairs.push(("out".into(), p.display().to_string()));
    }
    if let Some(p) = &args.json {
        pairs.push(("json".into(), p.display().to_string()));
    }
    if pairs.is_empty() {
        return Err(ConfigError::MissingKind.into());
    }
    Ok(ExperimentConfig::from_pairs(pairs)?)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = collect(&args).and_then(|c| run_experiment(&c));
    match result {
        Ok((output, stdout)) => {
            if let Some(csv) = stdout {
                let mut out = std::io::stdout().lock();
                if out.write_all(csv.as_bytes()).and_then(|_| out.flush()).is_err() {
                    return ExitCode::from(1);
                }
            }
            if output.failures > 0 {
                eprintln!("fockwalk: {} row(s) failed", output.failures);
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fockwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
