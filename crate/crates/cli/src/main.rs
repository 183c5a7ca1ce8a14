//! `rollmeasure`: trace-criterion sweeps, reduced-dynamics runs and density
//! checks for a rolling ellipsoid.
//!
//! Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
//! failure, 1 output could not be written.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rollmeasure_core::measure::SweepMode;

use crate::config::Triple;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "rollmeasure", version, about = "Invariant-measure experiments for a rolling ellipsoid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the trace criterion over the shape sphere and report the verdict.
    CheckMeasure(CheckArgs),
    /// Integrate the reduced (γ, K) equations.
    Simulate(SimulateArgs),
    /// Check a candidate density on random samples and along trajectories.
    VerifyDensity(DensityArgs),
    /// Run the vectorial and quasi-momentum formulations side by side.
    CompareBackends(CompareArgs),
}

/// Body parameters and I/O, shared by every command.
#[derive(Args, Debug)]
pub struct BodyArgs {
    /// Semi-axis along the first body axis.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Mass.
    #[arg(long)]
    pub m: Option<f64>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default `rollmeasure-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Numeric,
    Closed,
    Both,
}

impl ModeArg {
    pub fn sweep_mode(self) -> SweepMode {
        match self {
            ModeArg::Numeric => SweepMode::Numeric,
            ModeArg::Closed => SweepMode::ClosedForm,
            ModeArg::Both => SweepMode::Both,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModeArg::Numeric => "numeric",
            ModeArg::Closed => "closed",
            ModeArg::Both => "both",
        }
    }
}

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DensityArg {
    /// Closed-form density for a = b.
    Paper,
    Constant,
}

impl DensityArg {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityArg::Paper => "paper",
            DensityArg::Constant => "constant",
        }
    }
}

impl FromStr for DensityArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Grid points per chart direction (default 64).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Threshold below which the trace counts as zero (default 1e-8).
    #[arg(long)]
    pub tol_zero: Option<f64>,
    /// Trace evaluation (default both).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Step size (default 1e-3).
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Final time (default 10).
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Seed for random initial data when --gamma/--omega are absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial Poisson vector `x,y,z` (normalized).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Triple>,
    /// Initial angular velocity `x,y,z` in the body frame.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<Triple>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Candidate density: `paper` is the closed-form density for a = b (default).
    #[arg(long, value_enum)]
    pub density: Option<DensityArg>,
    /// Random sample points (default 200).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Trajectories for the Liouville defect (default 10).
    #[arg(long)]
    pub trajectories: Option<usize>,
    /// Largest |Ω| drawn (default 2).
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Step size of the trajectories (default 1e-3).
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Trajectory length (default 5).
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Required.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Step size (default 1e-4).
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Final time (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Triple>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<Triple>,
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::CheckMeasure(a) => commands::check_measure(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::VerifyDensity(a) => commands::verify_density(a),
        Command::CompareBackends(a) => commands::compare(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Config(_) | CliError::Input(_)) {
                eprintln!("usage: rollmeasure <check-measure|simulate|verify-density|compare-backends> --a A --b B --c C --m M [options]");
                eprintln!("see `rollmeasure <command> --help`");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
