//! `dirac-hess`: runs the verification suites and prints tables and symbol
//! evaluations.
//!
//! Exit codes: 0 pass, 1 failure (failed checks or runtime error), 2 usage.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dirac-hess", version, about = "Stability-symbol calculus and sphere Dirac determinants")]
pub struct Cli {
    /// Run the numeric kernels on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Sphere determinants and the extremal-type pattern.
    Table(TableArgs),
    /// Evaluate the Hessian symbol by full assembly and by the closed form.
    Symbol(SymbolArgs),
    /// Spectra of discretized model operators on the circle.
    Spectra(SpectraArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite names, or `all`. Repeatable or comma-separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = commands::suite_name)]
    pub suite: Vec<String>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Tolerance override, NAME=VALUE with VALUE > 0. Repeatable.
    #[arg(long = "tol", value_parser = commands::tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(4..=64))]
    pub nmax: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    #[arg(long)]
    pub n: usize,
    /// Real part of s.
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// Imaginary part of s.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s_im: f64,
    /// Covector components, comma-separated. Defaults to e_1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    /// Symmetric tensor entries, row-major n×n, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub k: Vec<f64>,
    /// Volume of the underlying manifold.
    #[arg(long, default_value_t = 1.0)]
    pub volume: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// |ξ|²(1 + log[ξ]) as a Fourier multiplier.
    LogMultiplier,
    /// |ξ|²(1 + log[ξ]) + a·cos x by collocation.
    LogCollocation,
    /// The even-dimensional stability symbol restricted to a line in Rⁿ.
    Stability,
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(long, value_enum, default_value = "log-collocation")]
    pub model: ModelKind,
    /// Mode cuts N; the operator acts on modes |m| ≤ N.
    #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 128, 256])]
    pub cuts: Vec<usize>,
    /// Amplitude of the cos x potential for the collocation model.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub potential: f64,
    /// Even dimension for the stability model.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Number of lowest eigenvalues to report.
    #[arg(long, default_value_t = 8)]
    pub lowest: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
