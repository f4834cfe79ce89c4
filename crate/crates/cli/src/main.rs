use std::panic;
use std::process::ExitCode;

use arima_ao::Error as ModelError;
use arima_ao_cli::commands::{cmd_detect, cmd_fit, cmd_simulate, DetectArgs, ModelArgs, SimulateArgs};
use arima_ao_cli::CliError;
use clap::{Parser, Subcommand};

/// ARIMA fitting and additive outlier detection for univariate series.
///
/// Logging verbosity follows RUST_LOG (default: warn).
#[derive(Parser)]
#[command(name = "arima-ao", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an ARIMA model and report coefficients and residual diagnostics.
    Fit(ModelArgs),
    /// Fit, then search for additive outliers and refit with indicators.
    Detect(DetectArgs),
    /// Write a simulated series as single-column CSV.
    Simulate(SimulateArgs),
}

fn report(err: &CliError) {
    eprintln!("error: {err}");
    if let CliError::Model(ModelError::Stability { roots }) = err {
        for (re, im) in roots {
            eprintln!("  root {:.6} {:+.6}i  (modulus {:.6})", re + 0.0, im + 0.0, re.hypot(*im));
        }
    }
    if let Some(hint) = err.hint() {
        eprintln!("hint: {hint}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = panic::catch_unwind(|| match &cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Simulate(args) => cmd_simulate(args),
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => {
            report(&err);
            ExitCode::from(err.exit_code())
        }
        Err(_) => ExitCode::from(4),
    }
}
