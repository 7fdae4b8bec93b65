//! Argument parsing and dispatch with the 0/1/2 exit-code contract.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cvd_core::rng::Parallelism;

use crate::commands;
use crate::config::{LoadedConfig, Purpose};
use crate::output::{Emitter, Format, Meta, Output};
use crate::reproduce;

pub const EXIT_OK: i32 = 0;
pub const EXIT_GUARD: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cvd", version, about = "Continuous-variable entanglement purification laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form outcome table and per-pair yield.
    Analytic(Common),
    /// Monte-Carlo runs of the ideal measurement.
    SimulateProtocol(Common),
    /// Trajectories, two-sided filter, infidelity scan and posterior confirmation.
    SimulateLoss(Common),
    /// Homodyne ensembles and the stochastic cavity check.
    SimulateQnd(Common),
    /// Measurement-time window of the cavity readout.
    Feasibility(Common),
    /// Every quoted number with a pass/fail flag.
    ReproducePaper(Common),
    /// Check a configuration without running anything.
    Validate(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, Purpose, &Common) {
        match self {
            Command::Analytic(c) => ("analytic", Purpose::Analytic, c),
            Command::SimulateProtocol(c) => ("simulate-protocol", Purpose::Protocol, c),
            Command::SimulateLoss(c) => ("simulate-loss", Purpose::Loss, c),
            Command::SimulateQnd(c) => ("simulate-qnd", Purpose::Qnd, c),
            Command::Feasibility(c) => ("feasibility", Purpose::Feasibility, c),
            Command::ReproducePaper(c) => ("reproduce-paper", Purpose::Reproduce, c),
            Command::Validate(c) => ("validate", Purpose::Any, c),
        }
    }
}

/// Worker cap from `CVD_THREADS`: unset uses the default pool, 0 is serial.
pub fn parallelism_from_env() -> Result<Parallelism, String> {
    match std::env::var("CVD_THREADS") {
        Err(_) => Ok(Parallelism::Auto),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Parallelism::from_thread_cap)
            .map_err(|_| format!("CVD_THREADS must be a non-negative integer, got {v:?}")),
    }
}

fn load(common: &Common, name: &str) -> Result<LoadedConfig, String> {
    match &common.config {
        None if name == "reproduce-paper" => Ok(LoadedConfig::empty()),
        None => Err("--config is required".into()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
            LoadedConfig::parse(&path.display().to_string(), &text).map_err(|e| e.to_string())
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let (name, purpose, common) = cli.command.parts();
    let cfg = match load(common, name) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let diag = cfg.validate(purpose);
    for e in &diag.errors {
        eprintln!("error: {}:{}: {}", cfg.source, e.line, e.message);
    }
    for w in &diag.warnings {
        eprintln!("warning: {}:{}: {}", cfg.source, w.line, w.message);
    }
    if !diag.is_ok() {
        return EXIT_CONFIG;
    }
    if purpose == Purpose::Any {
        println!(
            "{}: ok ({} warning{})",
            cfg.source,
            diag.warnings.len(),
            if diag.warnings.len() == 1 { "" } else { "s" }
        );
        return EXIT_OK;
    }

    let format_str = common.format.clone().or_else(|| cfg.config.run.format.clone()).unwrap_or_else(|| "csv".into());
    let Some(format) = Format::parse(&format_str) else {
        eprintln!("error: --format must be csv or json, got {format_str:?}");
        return EXIT_CONFIG;
    };
    let par = match parallelism_from_env() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let seed = common.seed.unwrap_or(cfg.config.run.seed);
    let emitter = Emitter {
        out_dir: common.out.clone().or_else(|| cfg.config.run.out_dir.as_ref().map(PathBuf::from)),
        format,
        meta: Meta {
            command: name.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: cfg.sha256(),
            seed,
        },
    };

    let result: cvd_core::Result<Vec<Output>> = match &cli.command {
        Command::Analytic(_) => commands::analytic(&cfg),
        Command::SimulateProtocol(_) => commands::simulate_protocol(&cfg, seed, par),
        Command::SimulateLoss(_) => commands::simulate_loss(&cfg, seed, par),
        Command::SimulateQnd(_) => commands::simulate_qnd(&cfg, seed, par),
        Command::Feasibility(_) => commands::feasibility(&cfg),
        Command::ReproducePaper(_) => reproduce::run(cfg.config.run.n_shots, seed, par).map(|checks| {
            let failed = checks.iter().filter(|c| !c.pass).count();
            eprintln!("{} checks, {} failed", checks.len(), failed);
            vec![Output::new("reproduce", reproduce::table(&checks), &checks).scalar("failed", failed)]
        }),
        Command::Validate(_) => unreachable!("handled above"),
    };
    match result {
        Ok(outputs) => match emitter.emit(&outputs) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: writing output: {e}");
                EXIT_GUARD
            }
        },
        Err(e) => {
            eprintln!("error: {}: {e}", e.guard_name());
            EXIT_GUARD
        }
    }
}
