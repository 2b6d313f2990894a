//! `energy-simo` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 infeasible
//! robust design.

mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::table::Table;

/// Constellation design and Monte Carlo experiments for energy-detection
/// SIMO links.
///
/// Any config field can be overridden with `--section.field VALUE`
/// (e.g. `--channel.K_dB -3`, `--design.L 8`, `--sim.n 50,100,200`).
#[derive(Debug, Parser)]
#[command(name = "energy-simo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `sim.shards`.
    #[arg(long, global = true)]
    shards: Option<usize>,

    /// Overrides `output.path`; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Design a constellation and write it as an artifact.
    Design,
    /// Chernoff bound and exponents of a constellation artifact.
    Evaluate,
    /// SER/BER at a single antenna count.
    Simulate,
    /// SER/BER over the list `sim.n`.
    SweepN,
    /// Smallest antenna count reaching `sim.target_ber`.
    MinAntennas,
    /// Per-symbol histograms of the energy statistic.
    Histogram,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Evaluate => "evaluate",
            Command::Simulate => "simulate",
            Command::SweepN => "sweep-n",
            Command::MinAntennas => "min-antennas",
            Command::Histogram => "histogram",
        }
    }
}

type Overrides = Vec<(String, String)>;

/// Splits `--section.field[=]value` pairs out of the argument list.
fn split_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut overrides = Vec::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(body) = arg.strip_prefix("--") else {
            rest.push(arg);
            continue;
        };
        let (key, inline) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !key.contains('.') {
            rest.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => iter.next().ok_or_else(|| CliError::Config(format!("--{key}: missing value")))?,
        };
        overrides.push((key, value));
    }
    Ok((rest, overrides))
}

fn run() -> Result<(), CliError> {
    let (args, overrides) = split_overrides(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Config(e.to_string().trim_end().to_string())),
    };
    let mut cfg = config::load(cli.config.as_deref(), &overrides, cli.command.name())?;
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Some(shards) = cli.shards {
        cfg.sim.shards = shards;
    }
    if let Some(out) = cli.out {
        cfg.output.path = Some(out);
    }
    if let Some(f) = cli.format {
        cfg.output.format = Some(match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        });
    }

    let (table, ok) = match cli.command {
        Command::Design => commands::cmd_design(&cfg)?,
        Command::Evaluate => (commands::cmd_evaluate(&cfg)?, true),
        Command::Simulate => (commands::cmd_simulate(&cfg)?, true),
        Command::SweepN => (commands::cmd_sweep_n(&cfg)?, true),
        Command::MinAntennas => (commands::cmd_min_antennas(&cfg)?, true),
        Command::Histogram => (commands::cmd_histogram(&cfg)?, true),
    };
    emit(&cfg, cli.command, &table)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Infeasible)
    }
}

fn emit(cfg: &ExperimentConfig, command: Command, table: &Table) -> Result<(), CliError> {
    let default = match command {
        Command::Design => Format::Json,
        _ => Format::Csv,
    };
    let text = table.render(cfg, cfg.output.format.unwrap_or(default));
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
