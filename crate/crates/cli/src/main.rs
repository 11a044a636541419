use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effort_contracts_cli::{run, table, Command, ExperimentConfig, Overrides};

/// Contract equilibria and budget-optimal contracts for effort-averse sensors.
#[derive(Parser)]
#[command(name = "effort-contracts", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Equilibrium efforts of the configured contract, one row per sensor.
    Equilibrium(RunArgs),
    /// Equilibria over a grid of gamma and sensor counts.
    Sweep(RunArgs),
    /// Budget-optimal contract for a quality bound or a budget.
    Design(RunArgs),
    /// Monte-Carlo check of the analytic quantities.
    Simulate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config's "output".
    #[arg(long)]
    output: Option<PathBuf>,
    /// RNG seed; overrides "simulate.seed".
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Equilibrium(a) => (Command::Equilibrium, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Design(a) => (Command::Design, a),
        Sub::Simulate(a) => (Command::Simulate, a),
    };
    let overrides = Overrides {
        output: args.output,
        seed: args.seed,
    };
    let result = ExperimentConfig::load(&args.config)
        .and_then(|cfg| run(command, &cfg, &overrides))
        .and_then(|outputs| table::write_outputs(&outputs));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
