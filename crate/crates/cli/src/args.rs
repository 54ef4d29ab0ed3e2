use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uqchain::Spin;

#[derive(Parser, Debug)]
#[command(
    name = "uqchain",
    version,
    about = "Quantum-group invariant spin chains: spectra, reality scans, metric operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of a chain; exit 2 when the spectrum is not real.
    Spectrum(SpectrumArgs),
    /// Scan gamma for the first loss of reality.
    ScanReality(ScanRealityArgs),
    /// Positivity range of the universal metric at alpha_0.
    ScanPd(ScanPdArgs),
    /// Build a metric operator for a chain; exit 2 when it is not a valid metric.
    Metric(MetricArgs),
    /// Run the identity suite; exit 2 when any identity fails.
    Verify(VerifyArgs),
    /// Recompute the published boundaries, tables and thresholds.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// A chain given either as a JSON file or by its parameters.
#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    /// JSON chain description: {"S": "1/2", "N": 3, "gamma": 0.3, "coupling": {...}}.
    #[arg(long, conflicts_with_all = ["spin", "sites", "gamma", "coupling", "channel"])]
    pub spec: Option<PathBuf>,
    /// Site spin, e.g. "1/2", "1", "3/2".
    #[arg(long = "S", value_name = "SPIN")]
    pub spin: Option<Spin>,
    /// Number of sites; inferred from the coupling when omitted.
    #[arg(long = "N", value_name = "SITES")]
    pub sites: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Per-bond couplings `[a_1, ...]`, a bond x channel table `[[b_10, b_11, ...], ...]`,
    /// or a tagged schedule object.
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<String>,
    /// Channel used with a flat coupling list.
    #[arg(long = "s", value_name = "CHANNEL")]
    pub channel: Option<u32>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Reality threshold on max |Im| / max(1, spectral radius).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScanRealityArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Upper end of the scanned range (default 0.999 pi/(2S)).
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub resolution: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScanPdArgs {
    #[arg(long = "S", value_name = "SPIN")]
    pub spin: Spin,
    #[arg(long = "N", value_name = "SITES")]
    pub sites: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub resolution: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    /// `e^{i alpha} eta^+ + e^{-i alpha} eta^-` from R-matrix products.
    Universal,
    /// `Omega* Omega` from the eigenvectors of the chain.
    Dynamical,
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value_t = MetricKind::Universal)]
    pub kind: MetricKind,
    /// Phase of the universal metric (default alpha_0).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Leave the matrix itself out of the report.
    #[arg(long)]
    pub no_matrix: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only this identity.
    #[arg(long)]
    pub only: Option<String>,
    /// Restrict to one spin (otherwise 1/2, 1, 3/2).
    #[arg(long = "S", value_name = "SPIN")]
    pub spin: Option<Spin>,
    /// Restrict to one chain length (otherwise 2, 3, 4).
    #[arg(long = "N", value_name = "SITES")]
    pub sites: Option<usize>,
    /// A single deformation instead of the five default samples.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// List the registered identities and exit.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// One group: three-site, bounds, alternating, dk, determinant, pd-threshold.
    #[arg(long)]
    pub only: Option<String>,
    /// Restrict the dk group to one spin.
    #[arg(long = "S", value_name = "SPIN")]
    pub spin: Option<Spin>,
    /// Restrict the dk group to one channel.
    #[arg(long = "s", value_name = "CHANNEL")]
    pub channel: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub resolution: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}
