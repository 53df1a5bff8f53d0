use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lerayflow::config::ExperimentConfig;
use lerayflow::manifest::RunManifest;
use lerayflow::{exit_code, pipelines, report, CliError, CliResult};

/// Pseudospectral experiments for incompressible flow on a periodic box.
#[derive(Parser)]
#[command(name = "lerayflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a configuration and execute its pipeline.
    Run {
        /// JSON experiment configuration.
        config: PathBuf,
    },
    /// Render the CSV bundle for a completed run.
    Report {
        /// Path to a run's manifest.json.
        manifest: PathBuf,
    },
    /// Validate a configuration without running anything.
    Validate {
        /// JSON experiment configuration.
        config: PathBuf,
    },
}

fn load_validated(path: &PathBuf) -> CliResult<(ExperimentConfig, Vec<u8>)> {
    let (config, bytes) = ExperimentConfig::from_path(path)?;
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }
    Ok((config, bytes))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate { config } => {
            load_validated(&config)?;
            println!("ok");
            Ok(())
        }
        Command::Run { config } => {
            let (cfg, bytes) = load_validated(&config)?;
            let out_dir = PathBuf::from(&cfg.output_dir);
            let manifest = pipelines::run(&cfg, &bytes, &out_dir)?;
            println!(
                "run complete: pipeline {:?}, {} artifacts, manifest {}",
                cfg.pipeline,
                manifest.telemetry.artifact_count,
                out_dir.join("manifest.json").display()
            );
            Ok(())
        }
        Command::Report { manifest } => {
            let m = RunManifest::read(&manifest)?;
            let dir = manifest
                .parent()
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            m.check_artifacts(&dir)?;
            let files = report::render(&m, &dir)?;
            for f in files {
                println!("{}", dir.join(f).display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
