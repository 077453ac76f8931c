//! `sst-track`: run and validate subspace-tracking experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sst_core::harness::{load_config, run_experiment, write_outputs, ExperimentConfig};
use sst_core::Error;

#[derive(Parser)]
#[command(
    name = "sst-track",
    version,
    about = "Robust sparse subspace tracking experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV traces plus metadata.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the config's seed list; repeat for several seeds.
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every N-th step in the CSV traces.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        stride: u64,
    },
    /// Parse and validate a config, printing the resolved form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_INVALID: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    let mut source = std::error::Error::source(err);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    ExitCode::from(if err.is_config_error() {
        EXIT_INVALID
    } else {
        EXIT_RUNTIME
    })
}

fn apply_overrides(
    mut cfg: ExperimentConfig,
    seeds: Vec<u64>,
    out: Option<PathBuf>,
) -> sst_core::Result<ExperimentConfig> {
    if !seeds.is_empty() {
        cfg.seeds = seeds;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!("{}", cfg.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run {
            config,
            seeds,
            out,
            stride,
        } => {
            let cfg = match load_config(&config).and_then(|c| apply_overrides(c, seeds, out)) {
                Ok(cfg) => cfg,
                Err(e) => return fail(&e),
            };
            let written = run_experiment(&cfg)
                .and_then(|res| write_outputs(&res, &cfg.output_dir, stride as usize));
            match written {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
