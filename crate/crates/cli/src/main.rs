use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use persgrad::experiments::Shape;
use persgrad::{KernelFamily, RadiusCap};

mod commands;
mod config;
mod failure;
mod formats;
mod svg;

/// Persistence-diagram losses on point clouds.
#[derive(Debug, Parser)]
#[command(name = "persgrad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a synthetic dataset to CSV, with a sibling labels file.
    Generate(GenerateArgs),
    /// Run Adam on a points file or generated dataset.
    Optimize(OptimizeArgs),
    /// Print persistence diagrams of a points file.
    Diagram(DiagramArgs),
    /// Compare the analytic gradient with central differences.
    CheckGrad(CheckGradArgs),
    /// Draw points or trajectory snapshots as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub shape: Shape,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write an `x0,x1` header row.
    #[arg(long)]
    pub header: bool,
}

/// Loss and regularizer settings shared by `optimize` and `check-grad`.
#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// `rho0` or `rho1`.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub kernel: Option<KernelFamily>,
    /// Kernel scale.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Highest homology dimension computed; defaults to the loss's.
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// `enclosing`, `unbounded`, or a radius.
    #[arg(long)]
    pub radius_cap: Option<RadiusCap>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Points CSV. A sibling `.labels.csv` is picked up if present.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Generate the input instead of reading it.
    #[arg(long, conflicts_with = "input")]
    pub shape: Option<Shape>,
    #[arg(long, requires = "shape")]
    pub n: Option<usize>,
    #[arg(long, requires = "shape")]
    pub seed: Option<u64>,
    /// TOML run file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Store coordinates in the trajectory every this many steps.
    #[arg(long)]
    pub snapshot_interval: Option<usize>,
    /// Output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DiagramFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub max_dim: usize,
    #[arg(long, default_value = "enclosing")]
    pub radius_cap: RadiusCap,
    #[arg(long, value_enum, default_value_t = DiagramFormat::Text)]
    pub format: DiagramFormat,
    /// Also list pairs with equal birth and death.
    #[arg(long)]
    pub include_zero: bool,
    /// Write here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckGradArgs {
    #[arg(short, long, required_unless_present = "random")]
    pub input: Option<PathBuf>,
    /// Use this many uniform random points in the unit square instead.
    #[arg(long, conflicts_with = "input")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Move the current coordinates by up to this much per axis, so the
    /// regularizer is away from its minimum.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Check the regularizer alone (no diagram pair is selected).
    #[arg(long)]
    pub regularizer_only: bool,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Points CSV, or a `trajectory.jsonl` with snapshots.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Group labels; defaults to the input's sibling labels file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// An `.svg` file for a single frame, otherwise a directory.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Width of the longer side in pixels.
    #[arg(long, default_value_t = 480)]
    pub size: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Optimize(args) => commands::optimize(args),
        Command::Diagram(args) => commands::diagram(args),
        Command::CheckGrad(args) => commands::check_grad(args),
        Command::Render(args) => commands::render(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
