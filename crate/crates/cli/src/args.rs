//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tail-sensitive goodness-of-fit testing.
#[derive(Debug, Parser)]
#[command(name = "tailtest", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a sample against a theoretical distribution.
    Test(TestArgs),
    /// Tabulate the null CDF G on a grid of sigma values.
    NullTable(NullTableArgs),
    /// Estimate rejection rates of the A test and the KS test by simulation.
    Power(PowerArgs),
    /// Kolmogorov-Smirnov test, one-sample or two-sample.
    Ks(KsArgs),
    /// Compare a Monte Carlo null sample with the computed null CDF.
    McCalibrate(McCalibrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Exact,
    Asymptotic,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// RNG seed for Monte Carlo evaluation.
    #[arg(long, default_value_t = 0x7a11_7e57)]
    pub seed: u64,
    /// Monte Carlo replicates.
    #[arg(long, default_value_t = 100_000)]
    pub replicates: u64,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Sample file: one value per line, or CSV with --column.
    #[arg(long)]
    pub sample: PathBuf,
    /// Column name when the sample file is CSV with a header.
    #[arg(long)]
    pub column: Option<String>,
    /// uniform(lo,hi), normal(mu,sigma), exponential(rate), table:<path>,
    /// ecdf:<path>[,<path>...] or mixture(w,<base>,<contaminant>).
    #[arg(long)]
    pub dist: String,
    /// Tail exponent a.
    #[arg(short, long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// How the p-value is computed. auto: closed form for a = 1, limiting law
    /// for large a and n, inversion otherwise.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Replace F = 1 (right) or F = 0 (left) by a value eps away from the
    /// boundary instead of reporting an infinite statistic.
    #[arg(long)]
    pub clamp: Option<f64>,
    /// Target relative tolerance of numerical inversion.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct NullTableArgs {
    /// Tail exponent a (with -n).
    #[arg(short, long, requires = "n", conflicts_with = "alpha")]
    pub a: Option<f64>,
    /// Sample size n (with -a).
    #[arg(short, long, requires = "a")]
    pub n: Option<u64>,
    /// Use the limiting law with this alpha = a/n.
    #[arg(long, required_unless_present = "a")]
    pub alpha: Option<f64>,
    /// Comma-separated sigma values.
    #[arg(long, conflicts_with = "range")]
    pub grid: Option<String>,
    /// lo:hi:count, evenly spaced and inclusive.
    #[arg(long, required_unless_present = "grid")]
    pub range: Option<String>,
    /// With --alpha, use the large-alpha series instead of inversion.
    #[arg(long, requires = "alpha")]
    pub series: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Distribution the data are tested against.
    #[arg(long)]
    pub null: String,
    /// Distribution the data are drawn from.
    #[arg(long)]
    pub alt: String,
    /// Sample size of each replicate.
    #[arg(short, long)]
    pub n: u64,
    /// Comma-separated values of a.
    #[arg(long, default_value = "1,2,4,8")]
    pub a_list: String,
    #[arg(long, default_value_t = 1000)]
    pub replicates: u64,
    #[arg(long, default_value_t = 0x7a11_7e57)]
    pub seed: u64,
    /// Nominal level of each test.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    #[arg(long)]
    pub sample_a: PathBuf,
    #[arg(long, conflicts_with = "dist", required_unless_present = "dist")]
    pub sample_b: Option<PathBuf>,
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct McCalibrateArgs {
    #[arg(short, long)]
    pub a: f64,
    #[arg(short, long)]
    pub n: u64,
    /// Number of evenly spaced order statistics to compare at.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}
