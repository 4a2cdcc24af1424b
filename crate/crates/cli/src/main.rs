use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crdisc::{config_from_flags, run_experiment, validate_config, CliError, ExperimentConfig, Overrides};

/// Numerical experiments on analytic discs attached to model CR manifolds.
#[derive(Parser, Debug)]
#[command(name = "crdisc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment; exit 0 on pass, 1 on fail, 2 on error.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long, conflicts_with_all = ["name", "k", "eps", "alpha", "grid_n", "out"])]
    config: Option<PathBuf>,
    /// Experiment name: dichotomy, composition-regularity, approximation-rate,
    /// eq103, hardy-littlewood, chain-propagation or sweep-rank.
    #[arg(long, required_unless_present = "config")]
    name: Option<String>,
    /// Sector order k of the default model.
    #[arg(long)]
    k: Option<u32>,
    /// Sector bridge width eps of the default model.
    #[arg(long)]
    eps: Option<f64>,
    /// Sector angle alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Grid size (power of two).
    #[arg(long = "grid-n")]
    grid_n: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        return validate_config(&text).map_err(CliError::from_violations);
    }
    let o = Overrides { k: args.k, eps: args.eps, alpha: args.alpha, grid_n: args.grid_n, out: args.out.clone() };
    config_from_flags(args.name.as_deref().unwrap_or_default(), &o).map_err(CliError::from_violations)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let result = load(&args).and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(r) => {
            println!("{}: {}", r.name, if r.pass { "PASS" } else { "FAIL" });
            ExitCode::from(if r.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
