use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "pathwise",
    version,
    about = "Quadratic variation and Ito-Follmer experiments along partition sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory receiving `<command>.csv` and `<command>.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 if any numerical check fails.
    #[arg(long = "assert", global = true)]
    pub assert: bool,
    /// Seed for random-walk paths.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate L(alpha) by series and by the independent oracle.
    LAlpha {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        terms: usize,
    },
    /// Floor-sum interval counts against the geometric Lebesgue count of rho^n(alpha).
    Count {
        /// Comma list or range `a..b` (inclusive).
        #[arg(long, default_value = "1000")]
        n: String,
        /// Comma list of shifts in [0,1).
        #[arg(long, default_value = "0")]
        alpha: String,
    },
    /// Stopped quadratic variation of z along rho^n(alpha).
    ZigzagQv {
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[command(flatten)]
        grid: NGrid,
        #[arg(long, default_value = "0.5,0.9,1")]
        t: String,
    },
    /// Parity alternation of the quadratic variation of p along sigma^n.
    PAlternation {
        #[command(flatten)]
        grid: NGrid,
    },
    /// Jump of the quadratic variation of q across t = 1 along tau^n.
    QJump {
        #[command(flatten)]
        grid: NGrid,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Weighted sums of q with the profiles f''_m along tau^n.
    Nonrepresentation {
        #[command(flatten)]
        grid: NGrid,
        /// Comma list of profile indices.
        #[arg(long, default_value = "1,2,4")]
        m: String,
    },
    /// Residual of the Ito-Follmer identity on single partitions.
    FormulaCheck {
        #[command(flatten)]
        target: Target,
        /// Comma list of affine, square, cube, exp.
        #[arg(long, default_value = "square")]
        f: String,
        #[arg(long, default_value = "10")]
        n: String,
        /// Comma list of jump thresholds.
        #[arg(long, default_value = "0.5")]
        eps: String,
    },
    /// Limit of the weighted second-order sums against the Stieltjes integral.
    CorollaryCheck {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "square")]
        f: String,
        #[arg(long, default_value = "10,11,12,13")]
        n: String,
        /// Samples closer than this are merged in the right-continuous modification.
        #[arg(long, default_value_t = 0.0)]
        resolution: f64,
    },
    /// Finite-n diagnostics for vanishing oscillation and left-limit convergence.
    Assumptions {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "0..12")]
        n: String,
        #[arg(long, default_value = "0.5,0.01")]
        eps: String,
        /// Comma list of times s for the left-limit table (default: quarters of T).
        #[arg(long)]
        t: Option<String>,
    },
    /// Lebesgue partition of a continuous path.
    LebPartition {
        #[arg(long, default_value = "z")]
        path: String,
        /// Grid (Z + alpha)/sqrt(n); ignored when --c is given.
        #[arg(long, default_value_t = 16)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Grid spacing c of c*Z + r.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
    },
}

#[derive(Debug, Args)]
pub struct NGrid {
    /// Explicit comma list or range `a..b`; overrides --nmax.
    #[arg(long)]
    pub n: Option<String>,
    /// Use {N/10, N/4, N/2, N}, each with its successor.
    #[arg(long, default_value_t = 100_000)]
    pub nmax: u64,
}

#[derive(Debug, Args)]
pub struct Target {
    /// Named path, `random_walk:STEPS`, inline JSON or a JSON file.
    #[arg(long)]
    pub path: String,
    /// fixed:t0,..,tk | uniform[:T] | dyadic[:T] | rho[:alpha] | sigma | tau | file:PATH
    #[arg(long, default_value = "dyadic")]
    pub partition: String,
}
