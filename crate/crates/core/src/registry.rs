//! Reducers behind one trait, registered by name and picked at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::deterministic::reduce_deterministic;
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::pipeline::{default_groups, default_trial_budget, reduce_divide_conquer, reduce_hybrid};
use crate::recombine::{
    reduce_basic, reduce_greedy, reduce_measure_with, reduce_with_resets, InnerReducer, RecombinationSolution,
    ResetSchedule,
};

/// A strategy that reduces a probability measure to at most `n+1` atoms.
pub trait Reducer: Send + Sync {
    /// Registry key.
    fn name(&self) -> &str;

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution>;
}

/// User-facing knobs; `None` means the dimension-dependent default.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReducerConfig {
    /// Iteration cap for `basic` and `greedy` (default `50n`).
    pub max_iterations: Option<usize>,
    /// Luby scale for `greedy-reset` (default `2n`).
    pub reset_c: Option<usize>,
    /// Groups per divide-and-conquer round (default `50(n+1)`).
    pub groups: Option<usize>,
    /// Greedy trials per hybrid round (default 10).
    pub trials: Option<usize>,
    /// Greedy iterations per hybrid trial (default `2n * n`).
    pub budget_per_trial: Option<usize>,
    /// Shuffle atoms (seeded) before grouping.
    pub shuffle_groups: bool,
}

/// [`ReducerConfig`] with every default filled in for dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedConfig {
    pub max_iterations: usize,
    pub reset_c: usize,
    pub groups: usize,
    pub trials: usize,
    pub budget_per_trial: usize,
    pub shuffle_groups: bool,
}

impl ReducerConfig {
    pub fn resolve(&self, dim: usize) -> ResolvedConfig {
        ResolvedConfig {
            max_iterations: self.max_iterations.unwrap_or(50 * dim).max(1),
            reset_c: self.reset_c.unwrap_or(2 * dim).max(1),
            groups: self.groups.unwrap_or_else(|| default_groups(dim)),
            trials: self.trials.unwrap_or(10),
            budget_per_trial: self.budget_per_trial.unwrap_or_else(|| default_trial_budget(dim)),
            shuffle_groups: self.shuffle_groups,
        }
    }
}

pub struct BasicReducer(pub ReducerConfig);

impl Reducer for BasicReducer {
    fn name(&self) -> &str {
        "basic"
    }

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution> {
        let cfg = self.0.resolve(measure.dim());
        reduce_measure_with(measure, |cloud| reduce_basic(cloud, seed, cfg.max_iterations))
    }
}

pub struct GreedyReducer(pub ReducerConfig);

impl Reducer for GreedyReducer {
    fn name(&self) -> &str {
        "greedy"
    }

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution> {
        let cfg = self.0.resolve(measure.dim());
        reduce_measure_with(measure, |cloud| reduce_greedy(cloud, seed, cfg.max_iterations))
    }
}

pub struct GreedyResetReducer(pub ReducerConfig);

impl Reducer for GreedyResetReducer {
    fn name(&self) -> &str {
        "greedy-reset"
    }

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution> {
        let cfg = self.0.resolve(measure.dim());
        reduce_measure_with(measure, |cloud| {
            reduce_with_resets(cloud, seed, ResetSchedule::new(cfg.reset_c), InnerReducer::Greedy)
        })
    }
}

pub struct DeterministicReducer;

impl Reducer for DeterministicReducer {
    fn name(&self) -> &str {
        "det"
    }

    fn reduce(&self, measure: &DiscreteMeasure, _seed: u64) -> Result<RecombinationSolution> {
        reduce_deterministic(measure)
    }
}

pub struct DivideConquerReducer {
    pub config: ReducerConfig,
    pub inner: Arc<dyn Reducer>,
}

impl Reducer for DivideConquerReducer {
    fn name(&self) -> &str {
        "dnc"
    }

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution> {
        let cfg = self.config.resolve(measure.dim());
        reduce_divide_conquer(measure, self.inner.as_ref(), cfg.groups, seed, cfg.shuffle_groups)
    }
}

pub struct HybridReducer(pub ReducerConfig);

impl Reducer for HybridReducer {
    fn name(&self) -> &str {
        "hybrid"
    }

    fn reduce(&self, measure: &DiscreteMeasure, seed: u64) -> Result<RecombinationSolution> {
        let cfg = self.0.resolve(measure.dim());
        reduce_hybrid(measure, cfg.trials, cfg.groups, cfg.budget_per_trial, seed, cfg.shuffle_groups)
    }
}

/// Names of the built-in reducers, in registration order.
pub const BUILTIN_REDUCERS: [&str; 6] = ["basic", "greedy", "greedy-reset", "det", "dnc", "hybrid"];

#[derive(Default, Clone)]
pub struct Registry {
    reducers: BTreeMap<String, Arc<dyn Reducer>>,
    aliases: BTreeMap<String, String>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every built-in reducer configured from `config`. `dnc` runs
    /// `greedy-reset` on each round.
    pub fn with_defaults(config: &ReducerConfig) -> Self {
        let mut reg = Self::new();
        let greedy_reset: Arc<dyn Reducer> = Arc::new(GreedyResetReducer(config.clone()));
        reg.register(Arc::new(BasicReducer(config.clone())));
        reg.register(Arc::new(GreedyReducer(config.clone())));
        reg.register(greedy_reset.clone());
        reg.register(Arc::new(DeterministicReducer));
        reg.register(Arc::new(DivideConquerReducer { config: config.clone(), inner: greedy_reset }));
        reg.register(Arc::new(HybridReducer(config.clone())));
        reg.alias("deterministic", "det");
        reg.alias("divide-conquer", "dnc");
        reg
    }

    /// Adds `reducer` under its own name, returning any reducer it replaced.
    pub fn register(&mut self, reducer: Arc<dyn Reducer>) -> Option<Arc<dyn Reducer>> {
        self.reducers.insert(reducer.name().to_string(), reducer)
    }

    pub fn alias(&mut self, alias: &str, target: &str) {
        self.aliases.insert(alias.to_string(), target.to_string());
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Reducer>> {
        let key = self.aliases.get(name).map_or(name, String::as_str);
        self.reducers.get(key).cloned().ok_or_else(|| Error::UnknownReducer(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.reducers.keys().map(String::as_str)
    }
}
