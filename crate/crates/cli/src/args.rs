use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fwnoise",
    version,
    about = "Spectral white-noise tests for functional time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a sample stored as CSV (rows = time, columns = grid points).
    Test(TestArgs),
    /// Simulate a sample and write it as CSV with a JSON sidecar.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo experiment and write the result as JSON.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Relevant,
    Similarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variance {
    H0,
    #[value(name = "h1-gaussian")]
    H1Gaussian,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Mode::Classical)]
    pub mode: Mode,
    /// Threshold for the relevant and similarity modes.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Standardizing variance; precise modes always use h1-gaussian.
    #[arg(long, value_enum)]
    pub variance: Option<Variance>,
    /// Also report the time-domain estimate with this lag cutoff.
    #[arg(long)]
    pub pt: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    #[value(name = "iid-bm")]
    IidBm,
    #[value(name = "iid-bb")]
    IidBb,
    Farch1,
    Far1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Gaussian,
    Wiener,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InnovationKind {
    Bm,
    Bb,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::IidBm)]
    pub model: ModelKind,
    #[arg(long, value_enum, default_value_t = Kernel::Gaussian)]
    pub kernel: Kernel,
    #[arg(long, default_value_t = fwnoise::simulate::DEFAULT_HS_NORM)]
    pub hs_norm: f64,
    #[arg(long, value_enum, default_value_t = InnovationKind::Bm)]
    pub innovation: InnovationKind,
    #[arg(long, default_value_t = fwnoise::simulate::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = fwnoise::simulate::DEFAULT_C_PSI)]
    pub c_psi: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sample length T.
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = fwnoise::mc::DESK_GRID_SIZE)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; the spec is written next to it with a `.json` suffix.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Table1,
    Table2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McModeArg {
    Classical,
    Relevant,
    Similarity,
    Coverage,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Models, lengths and alphas of a published design; overrides --model.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sample lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![256])]
    pub length: Vec<usize>,
    /// Levels, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = fwnoise::mc::DESK_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = fwnoise::mc::DESK_GRID_SIZE)]
    pub grid_size: usize,
    #[arg(long, value_enum, default_value_t = McModeArg::Classical)]
    pub mode: McModeArg,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Distance value whose coverage is counted in coverage mode.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
