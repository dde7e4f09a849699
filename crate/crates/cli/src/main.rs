//! `tomolab run`: batch tomography experiments with JSON and CSV output.

mod config;
mod run;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, RunArgs};
use run::Report;

#[derive(Debug, Parser)]
#[command(name = "tomolab", version, about = "Adaptive quantum tomography simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a protocol against a hidden state or channel.
    Run(RunArgs),
    /// List the gate library.
    Gates,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Gates => {
            for name in tomolab::gates::LIBRARY_GATES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let config = match ExperimentConfig::from_args(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: invalid configuration: {e:#}");
                    return ExitCode::from(2);
                }
            };
            match execute(&config) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn execute(config: &ExperimentConfig) -> Result<()> {
    log::info!("running {} on {} ({} reps)", config.protocol, config.hidden.label(), config.reps);
    let report = run::run(config)?;
    let stdout = std::io::stdout();
    write_csv(stdout.lock(), &report.rows)?;
    if let Some(dir) = &config.out {
        write_artifacts(dir, &report)?;
        log::info!("wrote artifacts to {}", dir.display());
    }
    Ok(())
}

fn write_artifacts(dir: &Path, report: &Report) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut text = serde_json::to_string_pretty(&report.json)?;
    text.push('\n');
    fs::write(dir.join("result.json"), text)?;
    write_csv(fs::File::create(dir.join("summary.csv"))?, &report.rows)?;
    if let Some(rows) = &report.comparison {
        write_csv(fs::File::create(dir.join("comparison.csv"))?, rows)?;
    }
    Ok(())
}

fn write_csv<W: Write, R: serde::Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
