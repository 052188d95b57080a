use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod io;

use error::CliError;

/// Sparse spline fitting and the numerical checks behind it.
#[derive(Parser, Debug)]
#[command(name = "lizkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a sparse spline to CSV data and write the model as JSON.
    Fit(FitArgs),
    /// Evaluate a model on a grid or at given points.
    Eval(EvalArgs),
    /// Run the invariant suite and emit a pass/fail CSV.
    Verify(VerifyArgs),
    /// Slice-theorem and filtered-inversion checks on one test field.
    RadonCheck(RadonCheckArgs),
    /// Growth of the fractional-Laplacian kernel derivatives.
    GrowthCheck(GrowthCheckArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FamilyName {
    Periodic,
    Fraclap,
    Ridge,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum LossName {
    Quadratic,
    Huber,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Operator order (periodic and fraclap).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Number of Fourier harmonics of the periodic Green's function.
    #[arg(long, default_value_t = lizkit::config::DEFAULT_TRUNCATION)]
    truncation: usize,
    /// Ridge order.
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Add the unpenalised polynomial of degree m - 1 to ridge fits.
    #[arg(long)]
    polynomial: bool,
    /// One value or a comma-separated ladder.
    #[arg(long, value_delimiter = ',', conflicts_with = "interpolate", required_unless_present = "interpolate")]
    lambda: Vec<f64>,
    /// Fit the data exactly (continuation in lambda).
    #[arg(long)]
    interpolate: bool,
    #[arg(long, value_enum, default_value_t = LossName::Quadratic)]
    loss: LossName,
    /// Huber threshold.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// CSV with header, columns `location..., y`.
    #[arg(long)]
    data: PathBuf,
    /// Model JSON. A ladder writes `<stem>.lambda<i>.json` instead.
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration diagnostics CSV (default `<out stem>.diagnostics.csv`).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Fitted values and residuals at the data (default `<out stem>.residuals.csv`).
    #[arg(long)]
    residuals: Option<PathBuf>,
    #[arg(long)]
    rel_gap: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
    /// Overridden by LIZKIT_SEED.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Fail with SchemaMismatch unless the model has this family.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    /// Axis `start:stop:count`, repeated once per dimension (tensor grid).
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    grid: Vec<String>,
    /// CSV with header; the first `d` columns are used as locations.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Output CSV `x0,...,f` (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check groups to run (comma separated); all by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Overridden by LIZKIT_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Report CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FieldName {
    Gaussian,
    OddGaussian,
    MexicanHat,
}

#[derive(Args, Debug)]
struct RadonCheckArgs {
    #[arg(long, value_enum, default_value_t = FieldName::Gaussian)]
    field: FieldName,
    #[arg(long, default_value_t = 128)]
    side: usize,
    #[arg(long, default_value_t = 0.11)]
    spacing: f64,
    #[arg(long, default_value_t = 180)]
    directions: usize,
    /// Band-limited upsampling of the filtered sinogram before backprojection.
    #[arg(long, default_value_t = 8)]
    refine: usize,
    #[arg(long, default_value_t = 1e-5)]
    slice_tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    inversion_tol: f64,
    /// Write the sinogram (binary plus JSON sidecar).
    #[arg(long)]
    dump_sinogram: Option<PathBuf>,
    /// Report CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GrowthCheckArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    d: usize,
    /// Multi-index, comma separated (defaults to zeros).
    #[arg(long, value_delimiter = ',')]
    k: Vec<u32>,
    #[arg(long, default_value_t = 1.0)]
    rmin: f64,
    #[arg(long, default_value_t = 100.0)]
    rmax: f64,
    /// Radii, log-spaced.
    #[arg(long, default_value_t = 21)]
    radii: usize,
    /// Directions per radius (d = 2) or both signs (d = 1).
    #[arg(long, default_value_t = 8)]
    directions: usize,
    /// CSV `norm_x,ratio,bound_C` (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn seed_override(flag: Option<u64>) -> Result<u64, CliError> {
    match std::env::var("LIZKIT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("LIZKIT_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(flag.unwrap_or(lizkit::solver::FitOptions::default().seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            CliError::usage(first.to_string()).report();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Eval(a) => commands::eval(a),
        Command::Verify(a) => commands::verify(a),
        Command::RadonCheck(a) => commands::radon_check(a),
        Command::GrowthCheck(a) => commands::growth_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}
