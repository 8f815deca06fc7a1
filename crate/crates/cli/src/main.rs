//! `cagc-lab`: scenario runner for the two-step Monge-Ampere toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;
mod status;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::output::Output;
use crate::status::{Classify, Failure, Outcome};

#[derive(Parser)]
#[command(name = "cagc-lab", version, about = "Experiments for the two-step Monge-Ampere equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve det D^2 w = (-w)^{-4} with zero boundary values.
    ChengYau(RunArgs),
    /// Solve det D^2 u = c w^{-4} with boundary data phi.
    TwoStep(RunArgs),
    /// Solve a family of two-step problems with c = e^{-t} and check the foliation.
    Foliation(RunArgs),
    /// Run a named fixture and print one PASS/FAIL line per check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Number of resolutions, doubling from the configured grid.
    #[arg(long, value_name = "N")]
    grid: Option<u32>,
    /// Directory for result files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario file (JSON) naming the fixture and its grid.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Fixture name: hyperboloid, trough, remark or stadium.
    #[arg(long, value_name = "NAME")]
    fixture: Option<String>,
    #[arg(long, value_name = "N")]
    grid: Option<u32>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn load(path: &Path, grid: Option<u32>) -> Result<ScenarioConfig, Failure> {
    ScenarioConfig::load(path).and_then(|c| c.with_levels(grid)).usage()
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CAGC_LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("CAGC_LAB_THREADS must be a positive integer, got {v:?}"))
        .usage()?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring threads").usage()
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    match cli.command {
        Command::ChengYau(a) => {
            commands::cmd_cheng_yau(&load(&a.config, a.grid)?, &Output::new(a.out.as_deref()).usage()?)
        }
        Command::TwoStep(a) => {
            commands::cmd_two_step(&load(&a.config, a.grid)?, &Output::new(a.out.as_deref()).usage()?)
        }
        Command::Foliation(a) => {
            commands::cmd_foliation(&load(&a.config, a.grid)?, &Output::new(a.out.as_deref()).usage()?)
        }
        Command::Verify(a) => {
            let cfg = match &a.config {
                Some(p) => load(p, a.grid)?,
                None => serde_json::from_str::<ScenarioConfig>("{}").usage()?.with_levels(a.grid).usage()?,
            };
            let fixture = a
                .fixture
                .or_else(|| cfg.fixture.clone())
                .ok_or_else(|| anyhow!("verify needs --fixture or a fixture in the config"))
                .usage()?;
            verify::cmd_verify(&fixture, &cfg, &Output::new(a.out.as_deref()).usage()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            match &outcome {
                Outcome::Pass => {}
                Outcome::Fail(msg) => eprintln!("cagc-lab: {msg}"),
                Outcome::Counterexample(msg) => eprintln!("cagc-lab: counterexample confirmed: {msg}"),
            }
            outcome.code()
        }
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("cagc-lab: error: {e:#}"),
                Failure::Solver(e) => eprintln!("cagc-lab: solver failure: {e:#}"),
            }
            f.code()
        }
    }
}
