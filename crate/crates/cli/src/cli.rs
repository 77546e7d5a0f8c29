use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use recombination::synth::Generator;
use recombination::ReducerConfig;

#[derive(Debug, Parser)]
#[command(name = "recombine", version, about = "Reduce discrete measures to at most n+1 atoms with the same mean")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce the uniform (or weighted) measure on the rows of a CSV file.
    Reduce(ReduceArgs),
    /// Least-squares coreset of a CSV dataset or a synthetic regression.
    Lsq(LsqArgs),
    /// Sweep reducers over generated instances and emit one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    /// Iteration cap for basic and greedy (default 50n).
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Luby scale for greedy-reset (default 2n).
    #[arg(long = "reset-c")]
    pub reset_c: Option<usize>,
    /// Groups per divide-and-conquer round (default 50(n+1)).
    #[arg(long)]
    pub groups: Option<usize>,
    /// Greedy trials per hybrid round before the deterministic fallback.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Greedy iterations per hybrid trial (default 2n^2).
    #[arg(long = "trial-budget")]
    pub trial_budget: Option<usize>,
    /// Shuffle atoms (seeded) before grouping.
    #[arg(long = "shuffle-groups")]
    pub shuffle_groups: bool,
}

impl AlgoArgs {
    pub fn config(&self) -> ReducerConfig {
        ReducerConfig {
            max_iterations: self.max_iter,
            reset_c: self.reset_c,
            groups: self.groups,
            trials: self.trials,
            budget_per_trial: self.trial_budget,
            shuffle_groups: self.shuffle_groups,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    /// CSV file with one point per row.
    pub input: PathBuf,
    /// basic, greedy, greedy-reset, det, dnc or hybrid.
    #[arg(long, default_value = "hybrid")]
    pub algo: String,
    #[arg(long, env = "RECOMBINE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Relative moment tolerance for validating the result.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// The first row holds column names.
    #[arg(long)]
    pub header: bool,
    /// Weight column (header name or 0-based index); uniform weights otherwise.
    #[arg(long)]
    pub weights: Option<String>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report wall-clock time (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub algo_args: AlgoArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LsqArgs {
    /// CSV dataset; the response is the last column unless --y-col says otherwise.
    #[arg(required_unless_present = "synth", conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// Synthetic regression instead of a file, e.g. `--synth N=100000 d=2 seed=3`.
    #[arg(long, num_args = 1..)]
    pub synth: Option<Vec<String>>,
    #[arg(long)]
    pub header: bool,
    /// Response column (header name or 0-based index).
    #[arg(long = "y-col")]
    pub y_col: Option<String>,
    /// Append a column of ones to X.
    #[arg(long)]
    pub intercept: bool,
    #[arg(long, default_value = "hybrid")]
    pub algo: String,
    #[arg(long, env = "RECOMBINE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub algo_args: AlgoArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// gauss15, gauss20 or expmix20.
    #[arg(long)]
    pub gen: Generator,
    /// Comma-separated reducer names.
    #[arg(long, value_delimiter = ',', default_value = "basic,greedy")]
    pub algos: Vec<String>,
    /// Instances per sample size.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Comma-separated sample sizes.
    #[arg(long = "Ns", value_delimiter = ',', default_value = "1000,10000")]
    pub sizes: Vec<usize>,
    #[arg(long, env = "RECOMBINE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Relative moment tolerance for the `valid` column.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Fill the wall_time_ms column (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub algo_args: AlgoArgs,
}
