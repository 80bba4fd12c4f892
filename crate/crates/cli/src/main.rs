use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gegenkrr_cli::{execute, Experiment, ExperimentConfig};

/// Runs a gegenkrr experiment and writes `{out}.csv` with a `{out}.meta.json` sidecar.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Flat TOML config (or JSON with the same keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path without extension, overriding the config.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match &args.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.output = out;
    }
    match execute(args.experiment, &config, args.threads) {
        Ok(files) => {
            println!("{}", files.csv.display());
            println!("{}", files.meta.display());
            for p in files.sidecars {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
