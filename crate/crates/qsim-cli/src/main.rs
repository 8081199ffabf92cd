//! Command-line front end: parses circuit files, dispatches to the exact,
//! Langevin or Metropolis evaluators and prints a JSON report on standard
//! output with a short human summary on standard error.
//!
//! Exit codes are part of the contract: 0 success, 1 unreadable or invalid
//! circuit file, 2 impossible prescription, 3 sampler failure, 64 bad usage.

mod commands;
mod report;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qsim", version, about = "Auxiliary-field sampler for two-bit gate circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a circuit file exactly by dense state-vector evolution.
    Exact {
        /// Circuit description file.
        file: PathBuf,
    },
    /// Estimate observables by complex Langevin sampling of the fields.
    Langevin {
        /// Circuit description file.
        file: PathBuf,
        #[command(flatten)]
        params: LangevinParams,
    },
    /// Estimate observables by Metropolis sampling with phase reweighting.
    Metropolis {
        /// Circuit description file.
        file: PathBuf,
        #[command(flatten)]
        params: MetropolisParams,
    },
    /// Built-in Fourier-transform demonstration: exact next to Langevin.
    DemoFft {
        /// Register size of the generated transform circuit.
        #[arg(long, default_value_t = 2, value_parser = at_least_one)]
        qubits: usize,
        #[command(flatten)]
        params: LangevinParams,
    },
}

#[derive(Args)]
pub struct LangevinParams {
    /// Integrator time step.
    #[arg(long, default_value_t = 0.01, value_parser = positive_float)]
    pub dt: f64,
    /// Steps discarded before sampling starts.
    #[arg(long = "burn-in", default_value_t = 1000)]
    pub burn_in: usize,
    /// Sampled steps per walker.
    #[arg(long, default_value_t = 10_000, value_parser = at_least_one)]
    pub samples: usize,
    /// Independent walkers pooled into one estimate.
    #[arg(long, default_value_t = 1, value_parser = at_least_one)]
    pub walkers: usize,
    /// Random number generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Starting field configuration.
    #[arg(long, value_enum, default_value_t = InitChoice::FixedPoint)]
    pub init: InitChoice,
    /// Largest drift magnitude a step may see before it is retried smaller.
    #[arg(long, default_value_t = 1000.0, value_parser = positive_float)]
    pub drift_cap: f64,
}

#[derive(Args)]
pub struct MetropolisParams {
    /// Width of the uniform proposal move per field component.
    #[arg(long, default_value_t = 0.3, value_parser = positive_float)]
    pub width: f64,
    /// Steps discarded before sampling starts.
    #[arg(long = "burn-in", default_value_t = 1000)]
    pub burn_in: usize,
    /// Sampled steps.
    #[arg(long, default_value_t = 10_000, value_parser = at_least_one)]
    pub samples: usize,
    /// Random number generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitChoice {
    /// Stationary configuration of the drift.
    FixedPoint,
    /// All fields zero.
    Zeros,
}

impl InitChoice {
    pub fn name(self) -> &'static str {
        match self {
            InitChoice::FixedPoint => "fixed-point",
            InitChoice::Zeros => "zeros",
        }
    }
}

fn positive_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be at least 1".into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Exact { file } => commands::exact(&file),
        Command::Langevin { file, params } => commands::langevin(&file, &params),
        Command::Metropolis { file, params } => commands::metropolis(&file, &params),
        Command::DemoFft { qubits, params } => commands::demo_fft(qubits, &params),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
