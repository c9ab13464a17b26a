//! `flyq`: gates, sweeps, oracle comparisons, spread fidelity and laboratory
//! parameters from the command line. Tables are CSV, everything else JSON.

mod commands;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "flyq", version, about = "Entangling gates from 1D contact collisions of flying qubits")]
pub struct Cli {
    /// Write the result here instead of stdout. CSV outputs get a
    /// `<path>.manifest.json` sidecar.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for Monte-Carlo sampling.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Oracle grid size: fast (4096 points) or accurate (16384 points).
    #[arg(long, global = true, default_value = "fast")]
    pub preset: PresetArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    Fast,
    Accurate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump one gate with its invariants and basis-state concurrences (JSON).
    Gate(GateArgs),
    /// Entangling power against (p_a + p_b) / c (CSV).
    Sweep(SweepArgs),
    /// Wavepacket propagation against the closed-form phase (CSV).
    Oracle(OracleArgs),
    /// Fidelity loss from a Gaussian spread of the total momentum (CSV).
    Fidelity(FidelityArgs),
    /// Coupling and wavenumbers for a laboratory setup file (JSON).
    Params(ParamsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GateKind {
    Boson,
    Fermion,
    Spinless,
    SpinlessIdeal,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    pub family: GateKind,
    #[arg(long)]
    pub pa: Option<f64>,
    #[arg(long)]
    pub pb: Option<f64>,
    /// Coupling; `inf` for the impenetrable limit.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpinFamily {
    Boson,
    Fermion,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "fermion")]
    pub family: SpinFamily,
    #[arg(long, default_value_t = 0.01)]
    pub min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub max: f64,
    /// Log-spaced points from --min to --max inclusive.
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// Monte-Carlo samples per point.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShapeArg {
    Square,
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Channel {
    Even,
    Odd,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Comma-separated values of c / 2k.
    #[arg(long, default_value = "0.1,0.2,0.5,1,2,3,5,10")]
    pub ratios: String,
    /// Number of barrier widths per ratio (at least 3); default from the preset.
    #[arg(long)]
    pub widths: Option<usize>,
    #[arg(long, default_value = "square")]
    pub shape: ShapeArg,
    #[arg(long, default_value = "even")]
    pub channel: Channel,
    /// Scale the computational domain; values below 1 eventually clip the packets.
    #[arg(long, default_value_t = 1.0)]
    pub domain_scale: f64,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long, default_value = "fermion")]
    pub family: SpinFamily,
    /// (p_a + p_b) / c of the central gate.
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    /// Comma-separated spreads delta_p / c.
    #[arg(long, default_value = "0.005,0.01,0.02,0.04,0.08")]
    pub delta_p: String,
    /// Gauss-Hermite order; the run fails unless doubling it changes nothing.
    #[arg(long, default_value_t = 40)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// key = value file with mass_kg, a3d_m, omega_perp_rad_s, velocity_m_s.
    pub config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flyq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

