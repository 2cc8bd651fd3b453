//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Result;
use config::ScenarioConfig;

#[derive(Debug, Parser)]
#[command(name = "parabose", version, about = "Para-Bose squeezed and coherent states: figure data and invariant checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a scenario key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Seed for the randomized parts of `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// SVS number distributions `n,P2n`.
    SvsProb,
    /// CS number distributions `n,Pn`.
    CsProb,
    /// CS wavefunction and density `x,psi_re,psi_im,rho`.
    Density,
    /// Completeness weight `r,w`.
    Weight,
    /// Oscillator trajectories and stationary distributions.
    Oscillator,
    /// Run the invariant suite.
    Verify,
    /// Analytic CS against the truncated-basis Schrödinger evolution.
    Evolve,
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    for s in &cli.set {
        cfg.set(s)?;
    }
    Ok(cfg)
}

/// Runs a command, writing progress to `stdout`; returns the exit status.
pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<i32> {
    let cfg = scenario(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.text("out_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let written = match cli.command {
        Command::SvsProb => commands::svs_prob(&cfg, &out)?,
        Command::CsProb => commands::cs_prob(&cfg, &out)?,
        Command::Density => commands::density(&cfg, &out)?,
        Command::Weight => commands::weight(&cfg, &out)?,
        Command::Oscillator => commands::oscillator(&cfg, &out)?,
        Command::Evolve => commands::evolve(&cfg, &out)?,
        Command::Verify => {
            let report = verify::run_suite(&verify::SuiteOptions {
                seed: cli.seed,
                sabotage: cfg.flag("sabotage", false),
            });
            let table = report.table();
            stdout.write_all(table.as_bytes())?;
            let path = out.join("verify.txt");
            output::write_atomic(&path, table.as_bytes())?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
    };
    for p in written {
        writeln!(stdout, "wrote {}", p.display())?;
    }
    Ok(0)
}
