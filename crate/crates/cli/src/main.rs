//! `balanced-lab`: command-line diagnostics for balanced metrics on Hartogs domains.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "balanced-lab", version, about = "Weighted Bergman kernels and balanced-metric diagnostics on Hartogs domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Series,
    ClosedForm,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Builtin profile: hyperbolic, springer, power:<nu>, truncated-hyperbolic:<x0>
    #[arg(long)]
    pub profile: Option<String>,
    /// Profile expression in x, e.g. "exp(-x)"
    #[arg(long = "profile-expr")]
    pub profile_expr: Option<String>,
    /// Domain bound for --profile-expr: a number or "inf"
    #[arg(long)]
    pub x0: Option<String>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<String>,
    /// Output path, or "-" for standard output
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct MethodArgs {
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// γ for the closed form; estimated from the moment identity when omitted
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SamplingArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that G(t) = -(tF'/F)' is positive on [0, x0)
    CheckKahler {
        #[command(flatten)]
        common: Common,
        /// Number of sample points
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Probe completeness through the integral of sqrt(G(u²))
    CheckComplete {
        #[command(flatten)]
        common: Common,
        /// Integrand evaluation budget
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Tabulate the moments c_k(F^m)
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long = "k-max")]
        k_max: Option<u32>,
    },
    /// Estimate γ in the moment identity
    Gamma {
        #[command(flatten)]
        common: Common,
        /// Comma-separated weights
        #[arg(long = "m-set")]
        m_set: Option<String>,
        /// Comma-separated probe points
        #[arg(long = "t-grid")]
        t_grid: Option<String>,
        #[arg(long = "k-max")]
        k_max: Option<u32>,
    },
    /// Evaluate the weighted Bergman kernel on the diagonal
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<u32>,
        /// Comma-separated coordinates z0,z1,... (complex as a+bi)
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[command(flatten)]
        method: MethodArgs,
        /// Series truncation tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate ε at a point or at sampled points
    Epsilon {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decide whether m g_F looks balanced
    Balanced {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Balanced verdicts over a range of weights
    QuantizationScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "m-from")]
        m_from: Option<u32>,
        #[arg(long = "m-to")]
        m_to: Option<u32>,
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Scalar curvature on a G×G grid in (x, w)
    Curvature {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        /// Finite-difference step
        #[arg(long)]
        h: Option<f64>,
        /// Constancy tolerance on the relative spread
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare det g with F²G/D^{n+1} at sampled points
    VolumeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("BALANCED_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("BALANCED_LAB_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot configure threads: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
