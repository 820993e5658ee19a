use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use mrp_core::cluster::MergeRule;
use mrp_core::entropy::RewardScope;

#[derive(Debug, Parser)]
#[command(
    name = "mrp",
    version,
    about = "Sparse-cut clustering with multiscale random walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a stochastic block model graph and its planted partition.
    Generate(GenerateArgs),
    /// Cluster a graph with solar systems, safe sets, and merging.
    ClusterMrp(ClusterMrpArgs),
    /// Rank random vertex sets by β-entropy.
    ClusterEntropy(ClusterEntropyArgs),
    /// Check the walk identities and bounds on a graph.
    Diagnose(DiagnoseArgs),
    /// Score a clustering, optionally against a reference partition.
    Evaluate(EvaluateArgs),
}

/// Options every subcommand accepts.
#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` file; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (falls back to MRP_THREADS, then all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Comma-separated block sizes, e.g. `30,30`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

impl FromStr for Sizes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad block size `{part}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Sizes)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Block sizes [default: 30,30].
    #[arg(long)]
    pub sizes: Option<Sizes>,
    /// Within-block edge probability [default: 0.5].
    #[arg(long)]
    pub p_in: Option<f64>,
    /// Cross-block edge probability [default: 0.01].
    #[arg(long)]
    pub p_out: Option<f64>,
    /// Planted partition JSON [default: the output path with extension `truth.json`].
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterMrpArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Number of solar centers [default: 4].
    #[arg(long)]
    pub n_c: Option<usize>,
    /// Ring width exponent: rings are 2^scale hops wide [default: 2].
    #[arg(long)]
    pub scale: Option<u32>,
    /// Angular blocks per ring [default: 8].
    #[arg(long)]
    pub n_b: Option<usize>,
    /// Fraction of each block drawn as its candidate set [default: 0.5].
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Relative absorption threshold for safe sets [default: 1.0].
    #[arg(long, allow_negative_numbers = true)]
    pub ra_al: Option<f64>,
    /// Mutual conductance threshold for merging [default: 0.1].
    #[arg(long, allow_negative_numbers = true)]
    pub phi_al: Option<f64>,
    /// Independent candidate draws; the best is kept [default: 3].
    #[arg(long)]
    pub repeats: Option<usize>,
    /// single-linkage or agglomerative [default: agglomerative].
    #[arg(long)]
    pub merge_rule: Option<MergeRule>,
    /// Assign leftover vertices by harmonic measure [default: true].
    #[arg(long)]
    pub complete: Option<bool>,
    /// Uniform draws before growing a candidate set [default: 50].
    #[arg(long)]
    pub max_tries: Option<usize>,
    /// Reference partition JSON; adds the adjusted Rand index to the metrics.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterEntropyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Cardinality of each random set [default: 10].
    #[arg(long)]
    pub kappa: Option<usize>,
    /// Random sets to score [default: 100].
    #[arg(long)]
    pub n_sets: Option<usize>,
    /// Sets to report [default: 5].
    #[arg(long)]
    pub top_m: Option<usize>,
    /// Covering ball radius [default: 1].
    #[arg(long)]
    pub rho: Option<usize>,
    /// Stopping horizon [default: 4 × diameter].
    #[arg(long)]
    pub horizon: Option<usize>,
    /// ball or ball-within-set [default: ball-within-set].
    #[arg(long)]
    pub scope: Option<RewardScope>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Random sets per occupation identity [default: 20].
    #[arg(long)]
    pub instances: Option<usize>,
    /// Largest power in the Chebyshev duality check [default: 8].
    #[arg(long)]
    pub duality_max_n: Option<usize>,
    /// Largest time in the Carne–Varopoulos sweep [default: 30].
    #[arg(long)]
    pub carne_t_max: Option<usize>,
    /// Largest step count in the Hoeffding sweep [default: 60].
    #[arg(long)]
    pub hoeffding_max_n: Option<usize>,
    /// Total-variation level of the mixing time [default: 0.25].
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Clustering JSON (`clusters` or `labels`).
    #[arg(long)]
    pub clustering: Option<PathBuf>,
    /// Reference partition JSON (`clusters` or `labels`).
    #[arg(long)]
    pub reference: Option<PathBuf>,
}
