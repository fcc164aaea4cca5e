//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime failure. Fatal
//! errors additionally emit one machine-readable JSON line on stderr.

mod calibrate;
mod config;
mod context;
mod report_cmd;
mod run;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};

use stepback::analysis::TaskFamily;

#[derive(Parser)]
#[command(
    name = "stepback",
    about = "Evaluation harness for abstraction-first (step-back) prompting strategies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config file and list every problem without executing.
    Validate {
        config: PathBuf,
    },
    /// Run the configured experiment and write artifacts to output_dir.
    Run {
        config: PathBuf,
        /// Worker threads for prediction/judging (0 = default pool).
        #[arg(long)]
        parallelism: Option<usize>,
        /// Reuse finalized predictions when the config digest matches;
        /// judging still reruns.
        #[arg(long)]
        resume: bool,
    },
    /// Summaries, win/loss matrices, and error breakdowns for a run.
    Report {
        dir: PathBuf,
        /// Strategy pair to compare as A,B (repeatable).
        #[arg(long = "compare", value_name = "A,B")]
        compare: Vec<String>,
        /// Error-annotation file (canonical line-delimited records).
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Taxonomy family when annotations alone are ambiguous.
        #[arg(long, value_parser = parse_family)]
        annotation_family: Option<TaskFamily>,
        /// Use majority-over-runs correctness instead of run-0 verdicts.
        #[arg(long)]
        majority: bool,
    },
    /// Sample judged items for human rating and report judge agreement.
    Calibrate {
        dir: PathBuf,
        /// Items to sample into the rating sheet.
        #[arg(long, default_value_t = 25)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_family(s: &str) -> Result<TaskFamily, String> {
    match s {
        "stem" => Ok(TaskFamily::Stem),
        "knowledge" => Ok(TaskFamily::Knowledge),
        other => Err(format!("expected stem or knowledge, got {other:?}")),
    }
}

fn parse_pair(s: &str) -> Result<(String, String)> {
    s.split_once(',')
        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .ok_or_else(|| anyhow!("--compare expects A,B, got {s:?}"))
}

fn machine_error(err: &anyhow::Error) {
    eprintln!(
        "{}",
        serde_json::json!({ "error": format!("{err:#}") })
    );
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Validate { config } => {
            let loaded = match config::load_config(&config) {
                Ok(loaded) => loaded,
                Err(e) => {
                    machine_error(&e);
                    println!("ERROR: {e:#}");
                    return Ok(1);
                }
            };
            let report = validate::validate(&loaded);
            report.print();
            Ok(if report.clean() { 0 } else { 1 })
        }
        Command::Run {
            config,
            parallelism,
            resume,
        } => {
            let loaded = match config::load_config(&config) {
                Ok(loaded) => loaded,
                Err(e) => {
                    machine_error(&e);
                    return Ok(1);
                }
            };
            let report = validate::validate(&loaded);
            if !report.clean() {
                report.print();
                machine_error(&anyhow!(
                    "validation failed with {} errors",
                    report.errors.len()
                ));
                return Ok(1);
            }
            let outcome = run::cmd_run(&loaded, parallelism, resume)?;
            println!(
                "run complete: {} generation calls, {} judge calls, {} failed predictions, artifacts in {}",
                outcome.generation_calls,
                outcome.judge_calls,
                outcome.failures,
                outcome.output_dir.display()
            );
            Ok(0)
        }
        Command::Report {
            dir,
            compare,
            annotations,
            annotation_family,
            majority,
        } => {
            let compare = compare
                .iter()
                .map(|s| parse_pair(s))
                .collect::<Result<Vec<_>>>()?;
            report_cmd::cmd_report(
                &dir,
                &report_cmd::ReportOptions {
                    compare,
                    annotations,
                    annotation_family,
                    majority,
                },
            )?;
            Ok(0)
        }
        Command::Calibrate { dir, sample, seed } => {
            calibrate::cmd_calibrate(&dir, sample, seed)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            machine_error(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
