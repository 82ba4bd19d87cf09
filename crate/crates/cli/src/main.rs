//! Command-line frontend for the QPSK displacement-receiver model.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qpsk-receiver",
    version,
    about = "Single-shot three-arm displacement receiver for QPSK coherent states",
    long_about = "Exact error probabilities, quantum benchmarks, displacement optimization,\n\
                  Monte Carlo cross-validation, parameter-space sweeps and wave-plate\n\
                  calibration for a three-arm single-shot QPSK displacement receiver.\n\
                  Values come from a TOML config file and/or flags; flags win."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the Helstrom bound and heterodyne (QNL) limit.
    Bounds(commands::bounds::BoundsArgs),
    /// Error probability along a photon-number grid.
    ErrorCurve(commands::curve::CurveArgs),
    /// Optimize displacements (and optionally splitting ratios).
    Optimize(commands::optimize::OptimizeArgs),
    /// Seeded Monte Carlo simulation of detection trials.
    Simulate(commands::simulate::SimulateArgs),
    /// Map log10(P_E / P_het) over a two-axis parameter grid.
    Sweep(commands::sweep::SweepArgs),
    /// Fit a fringe scan and emit the HWP angle table.
    Calibrate(commands::calibrate::CalibrateArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bounds(args) => commands::bounds::run(args),
        Command::ErrorCurve(args) => commands::curve::run(args),
        Command::Optimize(args) => commands::optimize::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Calibrate(args) => commands::calibrate::run(args),
    };
    if let Err(err) = result {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
