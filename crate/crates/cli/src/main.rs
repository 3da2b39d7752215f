#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod format;
mod svg;

use commands::{Experiment, Overrides};
use config::{ExperimentConfig, MuGrid};
use error::CliError;

/// Coalescent likelihood estimation with early stopping ("time machine").
#[derive(Debug, Parser)]
#[command(name = "coaltm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One mu and one stopping size: summary row plus per-repeat log-likelihoods.
    Estimate(RunArgs),
    /// Sweep the mu grid for every stopping size.
    Grid {
        #[command(flatten)]
        run: RunArgs,
        /// Also write SVG charts of log-likelihood and event counts against mu.
        #[arg(long)]
        plot: bool,
    },
    /// Exact likelihoods, split-moment distributions and bias gaps.
    Oracle(RunArgs),
    /// Monte Carlo estimates against their exact targets.
    Compare(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "TM_WORKERS")]
    workers: Option<usize>,
    /// Single mutation rate, replacing the config grid.
    #[arg(long, conflicts_with = "mu_grid")]
    mu: Option<f64>,
    /// Grid as start:stop:count.
    #[arg(long)]
    mu_grid: Option<MuGrid>,
    /// Comma-separated stopping sizes.
    #[arg(long, value_delimiter = ',')]
    ntm: Option<Vec<u32>>,
    /// Write `nan` for wall time so outputs are byte-comparable.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn experiment(&self) -> Result<Experiment, CliError> {
        let overrides = Overrides {
            out: self.out.clone(),
            seed: self.seed,
            workers: self.workers,
            mu: self.mu,
            mu_grid: self.mu_grid,
            ntm: self.ntm.clone(),
            no_timing: self.no_timing,
        };
        let cfg = overrides.apply(ExperimentConfig::load(&self.config)?);
        Experiment::prepare(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => commands::cmd_estimate(&args.experiment()?),
        Command::Grid { run, plot } => commands::cmd_grid(&run.experiment()?, plot),
        Command::Oracle(args) => commands::cmd_oracle(&args.experiment()?),
        Command::Compare(args) => commands::cmd_compare(&args.experiment()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
