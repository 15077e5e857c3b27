use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod scenario;

use error::CliError;
use scenario::Scenario;

/// Capacity / localization-CRB trade-offs for integrated localization and
/// communication.
#[derive(Debug, Parser)]
#[command(name = "ilac", version)]
struct Cli {
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one scenario key; repeatable, wins over the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Output directory for files written by `frontier`.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Grid size (frontier points per domain, capacity-loss points).
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity and optimal pilot of the communication block.
    Capacity,
    /// AoA, ToA and position CRBs of the localization block.
    Crb,
    /// CRB loss versus capacity loss for time-domain splits.
    TradeoffTime,
    /// CRB loss versus capacity loss for frequency-domain splits.
    TradeoffFreq,
    /// Sweep resource splits and write the frontier CSV.
    Frontier,
    /// Run every audit; exits 1 if any fails.
    Validate {
        #[arg(long, hide = true)]
        corrupt_alpha: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut overrides = cli.set;
    if let Some(g) = cli.grid {
        overrides.push(format!("grid={g}"));
    }
    let scenario = Scenario::load(cli.config.as_deref(), &overrides)?;
    let stdout = io::stdout().lock();
    match cli.command {
        Command::Capacity => commands::capacity(&scenario, stdout),
        Command::Crb => commands::crb(&scenario, stdout),
        Command::TradeoffTime => commands::tradeoff_time(&scenario, stdout),
        Command::TradeoffFreq => commands::tradeoff_freq(&scenario, stdout),
        Command::Frontier => {
            let path = commands::frontier(&scenario, &cli.out)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Validate { corrupt_alpha } => commands::validate(&scenario, corrupt_alpha, stdout),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
