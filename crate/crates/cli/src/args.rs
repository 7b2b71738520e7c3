use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "removal-lab", version, about = "Triangle removal experiments over F_p^n")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel experiments.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub threads: u64,
    /// Output directory.
    #[arg(long, global = true, env = "REMOVAL_LAB_OUT", default_value = "results")]
    pub out: PathBuf,
    /// File stem for outputs; defaults to the subcommand name.
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// `key=value` file of default flags; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate c_p, exponent C_p and the pruning schedule.
    Exponents(ExponentsArgs),
    /// Count triangles of an instance.
    Count(CountArgs),
    /// Per-point triangle degrees.
    Degrees(InstanceArgs),
    /// Generate an instance file.
    Construct(ConstructArgs),
    /// Lift by two dimensions to force the disjoint, independent structure.
    Lift(SourceArgs),
    /// k-th tensor power of an instance or matched collection.
    Tensor(TensorArgs),
    /// Product blow-up of a cross-free collection.
    Blowup(BlowupArgs),
    /// Greedy maximal family of disjoint triangles.
    Greedy(InstanceArgs),
    /// Remove high-degree points under the pruning schedule.
    Prune(PruneArgs),
    /// Random-subspace restriction trials.
    SubspaceSim(SubspaceArgs),
    /// Exact minimum deletion number.
    OracleMindel(MindelArgs),
    /// Exact maximum cross-free collection.
    OracleMaxmatch(MaxmatchArgs),
    /// Check the removal bound against the exact deletion number.
    Audit(MindelArgs),
    /// Exponent curve of tensor-power families.
    Frontier(FrontierArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exponents(_) => "exponents",
            Command::Count(_) => "count",
            Command::Degrees(_) => "degrees",
            Command::Construct(_) => "construct",
            Command::Lift(_) => "lift",
            Command::Tensor(_) => "tensor",
            Command::Blowup(_) => "blowup",
            Command::Greedy(_) => "greedy",
            Command::Prune(_) => "prune",
            Command::SubspaceSim(_) => "subspace-sim",
            Command::OracleMindel(_) => "oracle-mindel",
            Command::OracleMaxmatch(_) => "oracle-maxmatch",
            Command::Audit(_) => "audit",
            Command::Frontier(_) => "frontier",
        }
    }
}

impl Cli {
    pub fn stem(&self) -> String {
        self.common
            .name
            .clone()
            .unwrap_or_else(|| self.command.name().to_string())
    }
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance file (`fpn v1` format).
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub p: Option<u32>,
    /// Tabulate every supported prime.
    #[arg(long)]
    pub all: bool,
    /// Bracket width for the numeric minimization.
    #[arg(long, default_value_t = removal_lab::exponents::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMethod {
    Naive,
    Transform,
    Both,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = CountMethod::Both)]
    pub method: CountMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    /// Each role keeps each point independently with probability `density`.
    Random,
    /// `X = Y = Z = F_p^n`.
    Full,
    /// `m` random triangles with independent coordinates.
    Planted,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: ConstructKind,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Triangles to plant for `--kind planted`.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Matched collection file (`T: x y z` lines).
    #[arg(long)]
    pub matched: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub source: Source,
    /// Also write the result as `<name>.fpn` or `<name>.matched`.
    #[arg(long)]
    pub emit: bool,
}

#[derive(Debug, Args)]
pub struct TensorArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long)]
    pub emit: bool,
}

#[derive(Debug, Args)]
pub struct BlowupArgs {
    #[arg(long)]
    pub matched: PathBuf,
    #[arg(long)]
    pub l: u32,
    /// Recount the materialized blow-up and run the greedy bound.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub emit: bool,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Target deletion fraction as `a/b` or an integer.
    #[arg(long)]
    pub eps: String,
}

#[derive(Debug, Args)]
pub struct SubspaceArgs {
    /// Restrict this instance to random subspaces.
    #[arg(long, conflicts_with_all = ["target", "p", "n", "fixed"], required_unless_present = "target")]
    pub instance: Option<PathBuf>,
    /// Subspace dimension; for instances it defaults to `⌊log(1/(5ρ))/log p⌋`.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Write per-trial counts as a table.
    #[arg(long)]
    pub per_trial: bool,
    /// Estimate the probability that this point lies in a random subspace.
    #[arg(long, requires_all = ["p", "n", "d"])]
    pub target: Option<u64>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Condition on the subspace containing these two points.
    #[arg(long, num_args = 2, value_names = ["U", "V"], requires = "target")]
    pub fixed: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct Budget {
    #[arg(long, default_value_t = 100_000_000)]
    pub max_nodes: u64,
    #[arg(long, default_value_t = 600.0)]
    pub max_seconds: f64,
}

impl Budget {
    pub fn oracle(&self) -> removal_lab::oracle::OracleBudget {
        removal_lab::oracle::OracleBudget {
            max_nodes: self.max_nodes,
            max_seconds: self.max_seconds,
        }
    }
}

#[derive(Debug, Args)]
pub struct MindelArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub budget: Budget,
}

#[derive(Debug, Args)]
pub struct MaxmatchArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    /// Search without the size cap `⌊p^{(1-c_p)n}⌋`.
    #[arg(long)]
    pub no_cap: bool,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub emit: bool,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[arg(long)]
    pub p: Option<u32>,
    /// Use the exact maximum cross-free collection in `F_p^{base-n}` as base.
    #[arg(long, conflicts_with = "matched", requires = "p")]
    pub base_n: Option<u32>,
    /// Use this matched collection as base instead.
    #[arg(long, required_unless_present = "base_n")]
    pub matched: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub kmax: u32,
    #[command(flatten)]
    pub budget: Budget,
}
