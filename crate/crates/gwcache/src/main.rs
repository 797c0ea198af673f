use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gwcache::experiment::{run, ExperimentConfig};
use gwcache::Exec;

/// Rate-memory curves, bounds, gaps and bit-level simulations for cache-aided
/// multicast of correlated files.
#[derive(Debug, Parser)]
#[command(name = "gwcache", version)]
struct Args {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config's `out`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for library realizations; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<bool, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let output = run(&cfg, exec)?;
    match args.out.as_ref().or(cfg.out.as_ref()) {
        Some(path) => std::fs::write(path, &output.csv)?,
        None => print!("{}", output.csv),
    }
    for line in &output.summary {
        eprintln!("{line}");
    }
    Ok(output.passed)
}
