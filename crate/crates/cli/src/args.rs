use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hyperu",
    version,
    about = "Number-variance statistics for Heisenberg-family determinantal point processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the kernel and its hermitized form at two points.
    KernelEval(KernelEvalArgs),
    /// Mean, variance and ratio of a window count at one radius.
    Stats(StatsArgs),
    /// Moments over a grid of radii.
    Sweep(SweepArgs),
    /// Fit the variance growth of a sweep and label its hyperuniformity class.
    Classify(ClassifyArgs),
    /// Monte Carlo estimate of polydisk count moments.
    Mc(McArgs),
    /// Limiting constants C(m) and their large-m asymptote.
    Constants(ConstantsArgs),
    /// Run cross-route verification checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Ball,
    Polydisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Closed,
    Integral,
    Spectrum,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, default_value_t = 1)]
    pub dimension: usize,
    /// Comma-separated levels, one per coordinate (default: all zero).
    #[arg(long, value_delimiter = ',')]
    pub level: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Args)]
pub struct KernelEvalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// First point as re,im pairs: re_1,im_1,...,re_D,im_D.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub x: Vec<f64>,
    /// Second point, same layout as --x.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub y: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, value_enum, default_value_t = WindowArg::Ball)]
    pub window: WindowArg,
    #[arg(long, value_enum, default_value_t = RouteArg::Closed)]
    pub route: RouteArg,
    #[arg(long, default_value_t = 1e-9)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub radius: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Comma-separated radii (default: 16 geometric points from 1 to 50).
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Fraction of largest-radius rows used in the fit.
    #[arg(long, default_value_t = 0.5)]
    pub fit_window: f64,
    #[arg(long, default_value_t = 0.1)]
    pub slope_tol: f64,
    #[arg(long, default_value_t = 10.0)]
    pub curvature_improvement: f64,
    /// Classify a synthetic Poisson control (variance = mean) instead.
    #[arg(long)]
    pub poisson_control: bool,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_delimiter = ',')]
    pub radius: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub cell_floor: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tail_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    /// Comma-separated levels m.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
    pub level: Vec<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run only these checks (repeatable).
    #[arg(long)]
    pub check: Vec<String>,
    /// Multiplier applied to every tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
