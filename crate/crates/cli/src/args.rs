use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "dwrs", version, about = "Exact experiments with deterministic walks in random scenery over irrational rotations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for manifest.json, report.json and tables/*.csv.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(flatten)]
    pub budgets: Budgets,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Budgets {
    /// Largest walk length a single request may cover.
    #[arg(long, global = true, env = "DWRS_STEP_BUDGET")]
    pub step_budget: Option<u64>,
    /// Largest breakpoint count for the exact recurrence sweep.
    #[arg(long, global = true, env = "DWRS_SWEEP_CAP")]
    pub sweep_cap: Option<u64>,
    /// Deepest convergent used to certify comparisons.
    #[arg(long, global = true, env = "DWRS_DEPTH_CAP")]
    pub depth_cap: Option<usize>,
    /// Largest number of decimal digits of any q_n.
    #[arg(long, global = true, env = "DWRS_MAX_DIGITS")]
    pub max_digits: Option<u32>,
    /// Largest q_n with a precomputed window table.
    #[arg(long, global = true, env = "DWRS_TABLE_CAP")]
    pub table_cap: Option<u64>,
}

/// Which rotation number to use.
#[derive(Args, Debug, Clone, Default, Serialize)]
#[group(multiple = false)]
pub struct SystemArgs {
    /// Entropy dimension `u/v` in (0, 1) selecting the digit rule.
    #[arg(long)]
    pub tau: Option<String>,
    /// The golden rotation [0; 1, 1, 1, ...].
    #[arg(long)]
    pub golden: bool,
    /// Explicit partial quotients a_1,a_2,...
    #[arg(long, value_delimiter = ',')]
    pub digits: Option<Vec<String>>,
    /// Per-index exponents t_1,t_2,... for a_{n+1} (a_1 = 5).
    #[arg(long, value_delimiter = ',')]
    pub staircase: Option<Vec<String>>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    Prop31,
    Prop32,
    Prop33,
    Prop34,
    Lemma42,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exact,
    Constructive,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Seq {
    Squares,
    Identity,
    F,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Sampling {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Scenery bias P(A) as `u/v`.
    #[arg(long, default_value = "1/2")]
    pub bias: String,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Partial quotients a_1..a_count.
    Digits {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Convergents p_k/q_k for k = 0..=n.
    Convergents {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// omega(theta, n) with running extremes.
    Walk {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value = "0")]
        theta: String,
        #[arg(long)]
        n: u64,
        /// Also write every prefix sum to tables/walk.csv.
        #[arg(long)]
        record: bool,
    },
    /// Exact finite checks of the walk estimates and the recurrence set.
    Verify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        system: SystemArgs,
        /// Single index n.
        #[arg(long, conflicts_with = "max_n")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random angles per n.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Random times per n.
        #[arg(long, default_value_t = 10)]
        times: usize,
        /// Largest q_{n+1} for the exact lower bound at theta = 0.
        #[arg(long, default_value_t = 10_000_000)]
        exact_cap: u64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Sampled members walked for the recurrence set.
        #[arg(long, default_value_t = 1000)]
        member_samples: usize,
    },
    /// Label codings of sampled (theta, scenery) pairs.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        sampling: Sampling,
        /// Fixed angle for every sample instead of random ones.
        #[arg(long)]
        theta: Option<String>,
        /// Times to read, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "t_max")]
        times: Option<Vec<u64>>,
        /// Read every time 0..=t_max.
        #[arg(long)]
        t_max: Option<u64>,
    },
    /// The generating time set F, block by block.
    BuildF {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Stage table of log n / log s_n.
    Dimension {
        #[arg(long, value_enum)]
        seq: Seq,
        /// Number of terms for squares and identity.
        #[arg(long = "N", default_value_t = 1000)]
        terms: u64,
        #[command(flatten)]
        system: SystemArgs,
        /// Last block of F.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 0.5)]
        tail: f64,
    },
    /// Word counts, factor counts and cover bounds.
    Complexity {
        #[command(subcommand)]
        what: ComplexityCmd,
    },
    /// Lower estimate and upper envelope for the entropy dimension.
    Estimate {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 1.0 / 40.0)]
        rate_fraction: f64,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        #[arg(long, default_value_t = 2)]
        cover_size: u64,
        #[arg(long, default_value_t = 5000)]
        max_prefix: usize,
    },
    /// Re-run the command recorded in a manifest.
    Rerun { manifest: PathBuf },
}

#[derive(Subcommand, Debug, Serialize)]
pub enum ComplexityCmd {
    /// Distinct words and entropy along a block of F.
    Words {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        sampling: Sampling,
        /// Block index of F (default: the first block).
        #[arg(long)]
        block: Option<usize>,
        /// Largest block index used to build F.
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        /// Use at most this many times of the block.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Distinct length-k factors of z(0) for k = 1..=k_max.
    Sturmian {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[arg(long, default_value_t = 1_000_000)]
        horizon: u64,
    },
    /// Explicit upper bound on log N at each k.
    Bounds {
        #[command(flatten)]
        system: SystemArgs,
        /// Times k (default q_2..q_{max_n+1}).
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u64>>,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        cover_size: u64,
        /// Exponent in bound/k^e (default tau + 0.1, or 1).
        #[arg(long)]
        exponent: Option<f64>,
    },
}
