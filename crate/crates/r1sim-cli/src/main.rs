//! `r1sim` — run availability-consensus token-economy scenarios.
//!
//! Exit codes: 0 on success, 2 on configuration errors (parse or
//! validation), 1 on anything else.

use clap::{Parser, Subcommand};
use r1sim_core::sim::{self, ConfigError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "r1sim", version, about = "Deterministic availability-consensus and token-economy simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write the report set.
    Run {
        /// Scenario configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Master seed; overrides the scenario's `rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for events.log, CSVs and JSON reports.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the content digest of an event log file.
    Digest {
        #[arg(long)]
        log: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out } => cmd_run(config, seed, out),
        Command::Validate { config } => cmd_validate(config),
        Command::Digest { log } => cmd_digest(log),
    }
}

fn config_exit(err: &ConfigError) -> ExitCode {
    eprintln!("{err}");
    match err {
        ConfigError::Io(_) | ConfigError::Parse { .. } | ConfigError::Validation { .. } => {
            ExitCode::from(2)
        }
    }
}

fn cmd_run(config: PathBuf, seed: Option<u64>, out: PathBuf) -> ExitCode {
    let scenario = match sim::load_config(&config) {
        Ok(s) => s,
        Err(e) => return config_exit(&e),
    };
    let seed = seed.unwrap_or(scenario.rng_seed);
    let run = sim::run(scenario, seed);
    let summary = sim::report_summary(&run);
    let paths = match sim::write_reports(&run, &out) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot write reports to {}: {e}", out.display());
            return ExitCode::from(1);
        }
    };
    println!("seed:              {}", summary.seed);
    println!("epochs:            {}", summary.duration_epochs);
    println!("minted:            {} R1", summary.totals.minted.r1);
    println!("burned:            {} R1", summary.totals.burned.r1);
    println!("circulating:       {} R1", summary.totals.circulating.r1);
    println!("conservation:      {}", if summary.conservation_ok { "ok" } else { "VIOLATED" });
    println!("unfinalized:       {}", summary.unfinalized_epochs);
    println!("licenses:          {}", summary.licenses.len());
    println!("jobs:              {}", summary.jobs.len());
    if !summary.flags.is_empty() {
        println!("flags:             {}", summary.flags.len());
        for f in &summary.flags {
            println!("  - {f}");
        }
    }
    println!("digest:            {}", summary.digest);
    println!("reports:           {}", paths.summary_json.parent().unwrap_or(&out).display());
    if summary.conservation_ok {
        ExitCode::SUCCESS
    } else {
        // should be unreachable; a broken ledger must not exit quietly
        ExitCode::from(1)
    }
}

fn cmd_validate(config: PathBuf) -> ExitCode {
    match sim::load_config(&config) {
        Ok(s) => {
            println!(
                "configuration valid: {} epochs, {} accounts, {} nodes, {} oracles, {} jobs",
                s.duration_epochs,
                s.accounts.len(),
                s.nodes.len(),
                s.oracles.len(),
                s.jobs.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => config_exit(&e),
    }
}

fn cmd_digest(log: PathBuf) -> ExitCode {
    match std::fs::read(&log) {
        Ok(bytes) => {
            println!("{}", sim::digest_bytes(&bytes));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cannot read {}: {e}", log.display());
            ExitCode::from(1)
        }
    }
}
