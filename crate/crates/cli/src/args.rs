use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewlab::chan_bounds::{DEFAULT_EXHAUSTIVE_CAP, DEFAULT_RESTARTS};
use skewlab::SearchStrategy;

#[derive(Debug, Parser)]
#[command(name = "skewlab", version, about = "Weighted Wigner-Yanase-Dyson skew information and sum uncertainty bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skew information of one observable, operator or channel.
    Skew(SkewArgs),
    /// Every applicable lower bound for a set of observables or channels.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Qubit example with the three Pauli observables on a (theta, phi) grid.
    Example1(Example1Args),
    /// Randomized soundness audit of the observable bounds.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct SkewArgs {
    /// Density matrix file.
    #[arg(long)]
    pub state: PathBuf,
    /// Observable file, or a Kraus list with `--channel`.
    #[arg(long)]
    pub op: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Treat `--op` as a Kraus list and report the channel skew.
    #[arg(long)]
    pub channel: bool,
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Theorems 1-9 for N >= 2 observables.
    Observables(ObservablesArgs),
    /// Theorems 10-15 for N >= 2 channels.
    Channels(ChannelsArgs),
}

#[derive(Debug, Args)]
pub struct ObservablesArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Observable file; repeat for each observable.
    #[arg(long = "op", required = true)]
    pub ops: Vec<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    #[value(name = "local_search", alias = "local-search")]
    LocalSearch,
    Auto,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => SearchStrategy::Exhaustive,
            StrategyArg::LocalSearch => SearchStrategy::LocalSearch,
            StrategyArg::Auto => SearchStrategy::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChannelsArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Kraus list file; repeat for each channel.
    #[arg(long = "channel", required = true)]
    pub channels: Vec<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    pub strategy: StrategyArg,
    /// Largest (n!)^(N-1) exhaustive search may enumerate.
    #[arg(long, env = "SKEWLAB_EXHAUSTIVE_CAP", default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub cap: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Seed for local-search restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Example1Args {
    /// Grid size as THETAxPHI, e.g. 100x200.
    #[arg(long, default_value = "100x200")]
    pub grid: String,
    /// Squared Bloch radius, 0 < t <= 1.
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub dims: Vec<usize>,
    #[arg(long = "n-obs", value_delimiter = ',', default_value = "2,3,4")]
    pub n_obs: Vec<usize>,
    #[arg(long = "self-test-flip-sign", hide = true)]
    pub flip_sign: bool,
}
