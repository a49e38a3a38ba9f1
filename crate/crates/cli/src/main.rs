//! `teleport`: command-line front end for the noisy-teleportation experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use teleport_core::optimizer::OptimizerSettings;

#[derive(Debug, Parser)]
#[command(name = "teleport", version, about = "Optimized teleportation under source and resource noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the strength gauges γ and λ of a channel.
    Gauge(GaugeArgs),
    /// Optimize the protocol for one pair of noises.
    Optimize(OptimizeArgs),
    /// Sweep identical bit-flip noise on all qubits and write CSV.
    SweepBitflip(SweepArgs),
    /// Random channels binned by (γ, λ); write CSV and print a summary.
    RandomBatch(BatchArgs),
    /// Print the non-commutation witness of a source noise on a two-qubit state.
    TwirlDemo(TwirlArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Common {
    fn optimizer(&self) -> OptimizerSettings {
        let d = OptimizerSettings::default();
        OptimizerSettings {
            population: self.population.unwrap_or(d.population),
            generations: self.generations.unwrap_or(d.generations),
            restarts: self.restarts.unwrap_or(d.restarts),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct GaugeArgs {
    /// Channel JSON file.
    #[arg(required_unless_present = "named", conflicts_with = "named")]
    channel: Option<PathBuf>,
    /// Named channel, e.g. `bit_flip:0.25`.
    #[arg(long)]
    named: Option<String>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Source-noise JSON file.
    #[arg(long, required_unless_present = "source_named", conflicts_with = "source_named")]
    source: Option<PathBuf>,
    #[arg(long)]
    source_named: Option<String>,
    /// Resource-noise JSON file.
    #[arg(long, required_unless_present = "channel_named", conflicts_with = "channel_named")]
    channel: Option<PathBuf>,
    #[arg(long)]
    channel_named: Option<String>,
    /// Write the protocol JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.05)]
    p_min: f64,
    #[arg(long, default_value_t = 0.45)]
    p_max: f64,
    #[arg(long, default_value_t = 9)]
    steps: usize,
    /// Random measurement bases for the AFY average.
    #[arg(long, default_value_t = 20)]
    afy_samples: usize,
    /// CSV output (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// γ bin center.
    #[arg(long, required_unless_present = "preset")]
    gamma: Option<f64>,
    /// λ bin center.
    #[arg(long, required_unless_present = "preset")]
    lambda: Option<f64>,
    /// Run every preset bin (γ ∈ {0.25, 0.4, 0.5}, λ ∈ {0.225, 0.375, 0.475}).
    #[arg(long, conflicts_with_all = ["gamma", "lambda"])]
    preset: bool,
    /// Scenarios per bin.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 0.01)]
    bin_width: f64,
    #[arg(long, default_value_t = 20)]
    afy_samples: usize,
    /// CSV output (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TwirlArgs {
    /// Named source noise.
    #[arg(long, default_value = "amplitude_damping:0.5")]
    source: String,
    /// `choi:KIND:P`, `product00` or `random:SEED`.
    #[arg(long, default_value = "product00")]
    state: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
