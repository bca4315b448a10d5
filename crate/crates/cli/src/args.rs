use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::probability::parse_count;

#[derive(Debug, Parser)]
#[command(name = "contam-runs", version, about = "Longest runs and first hitting times of at most 1+1 contaminated runs")]
pub struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,

    /// Base seed for experiments (repetition i uses a seed derived from this and i)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Cap on worker threads; results do not depend on it
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    /// Directory for experiment output files
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and asymptotic quantities
    Analytic(AnalyticArgs),
    /// Exact values by enumeration or dynamic programming
    Oracle(OracleArgs),
    /// Run a simulation experiment and write CSV files plus a manifest
    Experiment(ExperimentArgs),
    /// Compare an empirical distribution file with a reference CDF
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DistArgs {
    /// Success probability, e.g. 1/3 or 0.5
    #[arg(long)]
    pub p: Option<String>,
    /// Probability of a type-I failure (+)
    #[arg(long)]
    pub q1: Option<String>,
    /// Probability of a type-II failure (-)
    #[arg(long)]
    pub q2: Option<String>,
}

impl DistArgs {
    pub fn given(&self) -> bool {
        self.p.is_some() || self.q1.is_some() || self.q2.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Probability that a window of length m qualifies
    #[value(name = "pA1")]
    PA1,
    /// Clumping correction alpha(m)
    Alpha,
    /// Centering sequence m(N), term by term
    #[value(name = "mN")]
    MN,
    /// Correction H(x) at N, term by term
    #[value(name = "H")]
    H,
    /// Accompanying CDF P(mu(N) - [m(N)] < k)
    Accompanying,
    /// Limit CDF 1 - exp(-x)
    Theorem1,
    /// Sandwich bounds on the no-occurrence probability
    Bounds,
    /// Derived constants C, C0, C1, C2, K
    Constants,
}

fn count(s: &str) -> Result<u64, String> {
    parse_count(s)
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    pub quantity: Quantity,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Window length
    #[arg(long)]
    pub m: Option<usize>,
    /// Sequence length (number of windows for `bounds`)
    #[arg(long = "N", alias = "n")]
    pub n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Single offset k for `accompanying`
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    pub k_min: i64,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub k_max: i64,
    /// Epsilon for `bounds` (default: the exact |P(no recurrence | A1) - alpha| at m)
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleQuery {
    /// P(A1) by enumeration over 3^m sequences
    Window,
    /// P(no recurrence in windows 2..m | A1) by enumeration
    Conditional,
    /// P(A1 and no recurrence in windows 2..m) by enumeration
    Joint,
    /// P(mu(N) < m) by dynamic programming
    LongestCdf,
    /// P(tau_m > N) by dynamic programming
    HittingTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub query: OracleQuery,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "N", alias = "n", value_parser = count)]
    pub n: Option<u64>,
    #[arg(long, value_enum, default_value_t = Arithmetic::Exact)]
    pub mode: Arithmetic,
    /// Work budget in state-transitions
    #[arg(long, value_parser = count, default_value = "1e9")]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Longest,
    Hitting,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Parameter preset of a published figure (1-8)
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8), conflicts_with = "config")]
    pub figure: Option<u8>,
    /// JSON experiment config, or a manifest from an earlier run
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Which experiment; with --figure the default runs both
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long = "N", alias = "n", value_parser = count)]
    pub n: Option<u64>,
    /// Number of repetitions
    #[arg(long, value_parser = count)]
    pub s: Option<u64>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Multiply N and s by this factor for desk-scale runs
    #[arg(long)]
    pub scale: Option<f64>,
    /// Per-repetition cap on simulated symbols in hitting mode
    #[arg(long, value_parser = count)]
    pub hitting_cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Empirical distribution CSV written by `experiment`
    pub empirical: PathBuf,
    /// `auto` (from the file header), `exponential`, `accompanying`, or a path to a CSV file
    #[arg(long, default_value = "auto")]
    pub against: String,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Sequence length for the accompanying reference
    #[arg(long = "N", alias = "n")]
    pub n: Option<f64>,
}
