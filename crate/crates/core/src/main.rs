use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qwalk::config::{parse_config_for, Command};
use qwalk::oracle::golden_text;
use qwalk::run::run;
use qwalk::{CoinOperator, WalkError};

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Exact multi-particle quantum walks on the line")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Joint and marginal distributions for every step.
    Simulate(RunArgs),
    /// Meeting probabilities per site and in total for every step.
    Meet(RunArgs),
    /// Stationary meeting estimate and localization decision.
    Localize(RunArgs),
    /// Cross-check the fast engine against the dense oracle.
    OracleCheck(RunArgs),
    /// Regenerate the oracle golden-value file (Hadamard coin).
    Golden {
        #[arg(long, default_value = "oracle_golden.txt")]
        out: PathBuf,
    },
}

fn execute(command: Command, args: &RunArgs) -> Result<bool, WalkError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        WalkError::Config(format!("cannot read config {}: {e}", args.config.display()))
    })?;
    let config = parse_config_for(&text, Some(command))?;
    let outcome = run(&config, &args.out)?;
    println!("{}", outcome.summary);
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Simulate(args) => execute(Command::Simulate, args),
        Cmd::Meet(args) => execute(Command::Meet, args),
        Cmd::Localize(args) => execute(Command::Localize, args),
        Cmd::OracleCheck(args) => execute(Command::OracleCheck, args),
        Cmd::Golden { out } => golden_text(&CoinOperator::hadamard()).and_then(|text| {
            fs::write(out, text).map_err(|source| WalkError::Io {
                path: out.display().to_string(),
                source,
            })?;
            println!("wrote {}", out.display());
            Ok(true)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
