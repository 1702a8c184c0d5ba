//! `bifrac` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical error. `BIFRAC_THREADS` caps the worker pool (0 = auto).

mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bifrac", version, about = "Bifractional displacement operators and phase-space functions")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fractional Fourier kernel values and the composition law.
    Kernel(KernelArgs),
    /// Moments and photon statistics of bifractional coherent states.
    StateStats(StateStatsArgs),
    /// Phase-space functions of an operator on a grid.
    Grid(GridArgs),
    /// Run the invariant checks and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    /// Transform angle in radians.
    #[arg(long, required_unless_present = "compose", conflicts_with = "compose")]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y: f64,
    /// Compose kernels at THETA1 and THETA2 by quadrature and compare with
    /// the kernel at their sum.
    #[arg(long, num_args = 2, value_names = ["THETA1", "THETA2"])]
    pub compose: Option<Vec<f64>>,
    /// Output point of the composed kernel.
    #[arg(long, default_value_t = 0.0)]
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct StateStatsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    /// Single angle θα in radians.
    #[arg(long, conflicts_with = "sweep_theta_alpha", required_unless_present = "sweep_theta_alpha")]
    pub theta_alpha: Option<f64>,
    /// Sweep θα as START:STOP:STEP.
    #[arg(long, value_name = "START:STOP:STEP", allow_hyphen_values = true)]
    pub sweep_theta_alpha: Option<String>,
    /// θβ; 0 uses the closed-form Bargmann route, anything else the
    /// truncated number-basis state.
    #[arg(long, default_value_t = 0.0)]
    pub theta_beta: f64,
    /// Append the Robertson-Schrödinger residual column.
    #[arg(long)]
    pub with_check: bool,
    /// Highest photon number in the statistics.
    #[arg(long, default_value_t = bifrac::states::DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Truncation for the θβ ≠ 0 route.
    #[arg(long, default_value_t = 64)]
    pub fock_dim: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Emit rows whose truncated state is flagged untrusted.
    #[arg(long)]
    pub allow_untrusted: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct GridArgs {
    /// weyl, wigner, bifrac-wigner, q, bifrac-q or bifrac-p.
    #[arg(long)]
    pub kind: bifrac::phasespace::FunctionKind,
    /// Operator: fock:n, coherent:a,b, thermal:s or file:PATH.
    #[arg(long)]
    pub op: String,
    /// α axis (and β axis unless --beta-range is given) as MIN:MAX:COUNT.
    #[arg(long, value_name = "MIN:MAX:COUNT", default_value = "-3:3:61", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, value_name = "MIN:MAX:COUNT", allow_hyphen_values = true)]
    pub beta_range: Option<String>,
    /// θα and θβ in radians.
    #[arg(long, num_args = 2, value_names = ["THETA_ALPHA", "THETA_BETA"], conflicts_with_all = ["theta_alpha", "theta_beta"])]
    pub angles: Option<Vec<f64>>,
    #[arg(long, requires = "theta_beta")]
    pub theta_alpha: Option<f64>,
    #[arg(long, requires = "theta_alpha")]
    pub theta_beta: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub fock_dim: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write the grid even when the truncation is flagged untrusted.
    #[arg(long)]
    pub allow_untrusted: bool,
    /// Check bifrac-wigner values against the transform-of-Weyl oracle
    /// on a 3×3 subset of the grid.
    #[arg(long)]
    pub verify_oracle: bool,
    /// Coarse quadrature step for bifrac-p.
    #[arg(long, default_value_t = 0.1)]
    pub p_step: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only checks whose name contains one of these substrings.
    #[arg(long, num_args = 1..)]
    pub only: Vec<String>,
    /// Fock dimension.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parameter points for the operator-integral oracle.
    #[arg(long, default_value_t = 2)]
    pub oracle_points: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the check names and exit.
    #[arg(long)]
    pub list: bool,
}

/// Why a command stopped, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Verification(String),
    Usage(String),
    Numeric(bifrac::Error),
    /// Output withheld because a truncation was flagged untrusted.
    Untrusted(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) | Failure::Untrusted(_) => 3,
        }
    }
}

impl From<bifrac::Error> for Failure {
    fn from(e: bifrac::Error) -> Self {
        Failure::Numeric(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Numeric(e) => write!(f, "{}: {e}", e.name()),
            Failure::Untrusted(m) => write!(f, "UntrustedTruncation: {m}"),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("BIFRAC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("BIFRAC_THREADS=`{raw}` is not a non-negative integer")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Kernel(a) => commands::kernel(&a),
        Command::StateStats(a) => commands::state_stats(&a),
        Command::Grid(a) => commands::grid(&a),
        Command::Verify(a) => commands::verify(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
