//! `pmh`: data generation, filtering, PMH runs and chain diagnostics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "pmh", version, about = "Particle filtering and particle Metropolis-Hastings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate an LGSS or SV dataset and write it as `t,x,y`.
    GenerateData(GenerateArgs),
    /// Run the fully adapted filter on LGSS data and compare with the Kalman filter.
    FilterLgss(FilterArgs),
    /// PMH for `phi` in the LGSS model.
    PmhLgss(PmhLgssArgs),
    /// PMH for `{mu, phi, sigma_v}` in the SV model.
    PmhSv(PmhSvArgs),
    /// Estimate a pre-conditioning matrix from a pilot trace.
    TuneProposal(TuneArgs),
    /// Standard deviation of the log-likelihood estimate over a grid of particle counts.
    NStudy(NStudyArgs),
    /// ACF, IACT, acceptance rate and a KS stationarity test for a trace.
    Diagnose(DiagnoseArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelKind {
    Lgss,
    Sv,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for every random stream of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "lgss")]
    kind: ModelKind,
    /// Number of observations `T`.
    #[arg(long, default_value_t = 250)]
    length: usize,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    sigma_v: Option<f64>,
    /// LGSS only.
    #[arg(long)]
    sigma_e: Option<f64>,
    /// SV only.
    #[arg(long)]
    mu: Option<f64>,
    /// LGSS only.
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LgssFixed {
    #[arg(long, default_value_t = 0.75)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_v: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma_e: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
}

#[derive(Args, Debug)]
struct FilterArgs {
    /// `t,x,y` or `t,y` CSV; the bundled reference dataset when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    particles: usize,
    #[command(flatten)]
    model: LgssFixed,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    burnin: Option<usize>,
    /// Proposal standard deviation, one value per parameter.
    #[arg(long, value_delimiter = ',', conflicts_with = "covariance")]
    step_size: Option<Vec<f64>>,
    /// Pre-conditioning matrix (e.g. from `tune-proposal`), scaled by 2.562²/d.
    #[arg(long)]
    covariance: Option<PathBuf>,
    /// Starting point in natural parameters.
    #[arg(long, value_delimiter = ',')]
    initial: Option<Vec<f64>>,
    /// Lags used for the IACT in the summary.
    #[arg(long, default_value_t = 100)]
    lags: usize,
}

#[derive(Args, Debug)]
struct PmhLgssArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 1.0)]
    sigma_v: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma_e: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PmhSvArgs {
    /// Series (`t,y` / `t,x,y`) or price (`date,close`) CSV; the bundled
    /// synthetic dataset when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// First date kept from a price file.
    #[arg(long)]
    from: Option<String>,
    /// Last date kept from a price file.
    #[arg(long)]
    to: Option<String>,
    #[command(flatten)]
    chain: ChainArgs,
    /// Random walk on `{mu, artanh(phi), ln(sigma_v)}`.
    #[arg(long)]
    reparam: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TuneArgs {
    /// Pilot trace CSV.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 0)]
    burnin: usize,
    /// Estimate the matrix in `{mu, artanh(phi), ln(sigma_v)}` coordinates.
    #[arg(long)]
    reparam: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct NStudyArgs {
    #[arg(long, value_enum, default_value = "sv")]
    model: ModelKind,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Particle counts to study.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,500")]
    particles: Vec<usize>,
    /// Independent filter runs per particle count.
    #[arg(long, default_value_t = 200)]
    runs: usize,
    /// Parameters the filter is run at (`mu,phi,sigma_v` or `phi,sigma_v,sigma_e`).
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 0)]
    burnin: usize,
    #[arg(long, default_value_t = 100)]
    lags: usize,
    /// KS thinning lag; the first lag with ACF below 0.05 when omitted.
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
