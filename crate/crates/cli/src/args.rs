use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "uavplace",
    version,
    about = "Lifetime-maximizing placement of a fixed-altitude UAV base station"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded scenario file.
    Generate(GenerateArgs),
    /// Report per-device ranges, region emptiness and the concavity certificate.
    Check(CheckArgs),
    /// Run gradient projection ascent.
    Solve(SolveArgs),
    /// Exhaustive grid search over the feasible set.
    Grid(GridArgs),
    /// Sample the objective surface as CSV or SVG.
    Surface(SurfaceArgs),
    /// Run a canned experiment and compare with published numbers.
    Reproduce(ReproduceArgs),
}

/// Radio parameters; defaults are the reference values.
#[derive(Debug, Clone, Args)]
pub struct RfArgs {
    /// Per-device data rate (bit/s).
    #[arg(long, default_value_t = 4.0e6)]
    pub rate: f64,
    /// Total bandwidth (Hz).
    #[arg(long, default_value_t = 50.0e6)]
    pub bandwidth: f64,
    /// Noise power (W).
    #[arg(long, default_value_t = 1.0e-14)]
    pub noise: f64,
    /// Carrier frequency (Hz).
    #[arg(long, default_value_t = 4.0e9)]
    pub frequency: f64,
    /// Maximum device transmit power (W).
    #[arg(long, default_value_t = 0.5)]
    pub p_max: f64,
    /// Minimum uplink duration per device (s).
    #[arg(long, default_value_t = 900.0)]
    pub tau_th: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of uniformly placed devices.
    #[arg(long, required_unless_present = "clusters")]
    pub count: Option<usize>,
    /// Area as WIDTHxHEIGHT in meters, anchored at the origin.
    #[arg(long, default_value = "250x250")]
    pub area: String,
    #[arg(long, default_value_t = 4500.0)]
    pub energy_low: f64,
    #[arg(long, default_value_t = 18000.0)]
    pub energy_high: f64,
    #[arg(long)]
    pub seed: u64,
    /// Gaussian clusters: `cx,cy,std,count[,energy_low,energy_high]` separated by `;`.
    #[arg(long)]
    pub clusters: Option<String>,
    /// UAV altitude (m).
    #[arg(long, default_value_t = 650.0)]
    pub altitude: f64,
    /// Speed of light (m/s); 3e8 reproduces published figures.
    #[arg(long = "c")]
    pub speed_of_light: Option<f64>,
    #[command(flatten)]
    pub rf: RfArgs,
    /// Output path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Options shared by commands that read a scenario.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    pub scenario: PathBuf,
    /// Override the scenario's altitude (m).
    #[arg(long = "z")]
    pub altitude: Option<f64>,
    /// Override the speed of light (m/s).
    #[arg(long = "c")]
    pub speed_of_light: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: ScenarioArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Box,
    Region,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Region)]
    pub mode: ModeArg,
    /// Initial step size (m^3/J); inverse Hessian spectral radius when absent.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Stop once an iteration moves less than this (m).
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// `centroid`, `X,Y` or `random:SEED`.
    #[arg(long, default_value = "centroid")]
    pub init: String,
    /// Fixed step without backtracking.
    #[arg(long)]
    pub no_line_search: bool,
    /// Start from the best node of a grid with this spacing (m).
    #[arg(long)]
    pub grid_start: Option<f64>,
    /// Write the full report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the trajectory as CSV.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub input: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Region)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub input: ScenarioArgs,
    #[arg(long, default_value_t = 5.0)]
    pub spacing: f64,
    /// Output path; the format follows the extension unless `--format` is set.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<SurfaceFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Uniform,
    Nonuniform,
    Concavity,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    /// Scenario seed; defaults to the canned one.
    #[arg(long)]
    pub seed: Option<u64>,
}
