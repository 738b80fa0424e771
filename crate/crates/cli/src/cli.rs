//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use semctx::Scenario;

use crate::commands::{self, Globals, RateArgs, SimulateArgs, SweepArgs};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "semctx", version, about = "Rates and random-binning simulations for context-dependent semantic channels")]
pub struct Cli {
    /// Master seed; overrides the scenario's codec seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file; exit 3 on invalid tables, 4 on scenario mismatch.
    Validate {
        /// Scenario file, or `catalog:<id>`.
        path: String,
    },
    /// Print the scenario's rate report as JSON.
    Rate {
        path: String,
        /// Evaluate under this scenario instead of the file's.
        #[arg(long)]
        scenario: Option<Scenario>,
        #[arg(long)]
        u_size: Option<usize>,
        /// Also run the exhaustive lattice oracle and report the difference.
        #[arg(long)]
        oracle: bool,
        /// Oracle lattice resolution.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Run Monte Carlo trials of the binning scheme and print one CSV row.
    Simulate {
        path: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        rate_tilde: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Trials per freshly drawn codebook.
        #[arg(long)]
        block_size: Option<usize>,
        /// Also decode with the maximum-likelihood baseline.
        #[arg(long)]
        ml: bool,
        #[arg(long)]
        json: bool,
    },
    /// Simulate a grid of block lengths and rates, write CSV and print a threshold summary.
    Sweep {
        path: String,
        /// Comma-separated block lengths.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        block_lengths: Vec<usize>,
        /// Comma-separated message rates in bits per use.
        #[arg(long, value_delimiter = ',', conflicts_with = "rate_fractions")]
        rates: Option<Vec<f64>>,
        /// Comma-separated multiples of the computed rate.
        #[arg(long, value_delimiter = ',')]
        rate_fractions: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        block_size: Option<usize>,
        #[arg(long)]
        ml: bool,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Built-in scenarios.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { id: String },
    Export { id: String, path: PathBuf },
}

/// Execute a parsed command line and return its stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let g = Globals::from_env(cli.seed)?;
    match cli.command {
        Command::Validate { path } => commands::validate(&commands::load(&path)?),
        Command::Rate {
            path,
            scenario,
            u_size,
            oracle,
            resolution,
        } => commands::rate(
            &commands::load(&path)?,
            &RateArgs {
                scenario,
                u_size,
                oracle,
                resolution,
            },
            &g,
        ),
        Command::Simulate {
            path,
            n,
            rate,
            rate_tilde,
            epsilon,
            trials,
            block_size,
            ml,
            json,
        } => commands::simulate(
            &commands::load(&path)?,
            &SimulateArgs {
                n,
                rate,
                rate_tilde,
                epsilon,
                trials,
                block_size,
                ml,
                json,
            },
            &g,
        ),
        Command::Sweep {
            path,
            block_lengths,
            rates,
            rate_fractions,
            trials,
            epsilon,
            block_size,
            ml,
            out,
        } => {
            let res = commands::sweep(
                &commands::load(&path)?,
                &SweepArgs {
                    block_lengths,
                    rates,
                    rate_fractions,
                    trials,
                    epsilon,
                    block_size,
                    ml,
                },
                &g,
            )?;
            std::fs::write(&out, &res.csv)
                .map_err(|e| CliError::parse(format!("cannot write {}: {e}", out.display())))?;
            Ok(res.summary)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => Ok(commands::catalog_list()),
            CatalogAction::Show { id } => commands::catalog_show(&id),
            CatalogAction::Export { id, path } => commands::catalog_export(&id, &path),
        },
    }
}

/// Parse `args` (program name first) and run; clap usage errors map to exit code 2.
pub fn run_args<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::parse(e.to_string()))?;
    run(cli)
}
