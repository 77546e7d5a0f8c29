//! Divide and conquer over group barycenters, and the hybrid
//! randomized/deterministic reducer built on it.
//!
//! Each round partitions the current support into `G` contiguous groups,
//! reduces the measure on the group barycenters to at most `n+1` atoms, keeps
//! only atoms of surviving groups, and rescales their weights by
//! `w*_g / W_g` so the mean and the total mass are preserved exactly.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::deterministic::reduce_deterministic;
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::recombine::{prepare, reduce_greedy_with, GreedyOptions, Method, Prepared, RecombinationSolution};
use crate::registry::Reducer;
use crate::seed::{derive_seed, rng_from_seed};

/// Default number of groups per round, `50(n+1)`.
pub fn default_groups(dim: usize) -> usize {
    50 * (dim + 1)
}

/// Default greedy iteration budget per hybrid trial, `2n * n`.
pub fn default_trial_budget(dim: usize) -> usize {
    2 * dim * dim
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupPlan {
    /// Group id of every atom, in atom order.
    pub assignments: Vec<usize>,
    pub group_count: usize,
    /// Filled by [`barycenter_measure`].
    pub group_weights: Vec<f64>,
    /// `n x G`, filled by [`barycenter_measure`].
    #[serde(skip)]
    pub group_barycenters: DMatrix<f64>,
}

impl GroupPlan {
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.group_count];
        self.assignments.iter().for_each(|&g| sizes[g] += 1);
        sizes
    }

    /// Atom ranges of every group (groups are contiguous).
    fn ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.group_sizes()
            .into_iter()
            .map(|s| {
                let r = start..start + s;
                start += s;
                r
            })
            .collect()
    }
}

/// Contiguous groups of size `floor(len/G)` or `ceil(len/G)`, larger ones first.
pub fn partition_groups(len: usize, groups: usize) -> Result<GroupPlan> {
    if groups == 0 || groups > len {
        return Err(Error::BadGroupCount { groups, len });
    }
    let (base, extra) = (len / groups, len % groups);
    let mut assignments = Vec::with_capacity(len);
    for g in 0..groups {
        let size = base + usize::from(g < extra);
        assignments.extend(std::iter::repeat(g).take(size));
    }
    Ok(GroupPlan {
        assignments,
        group_count: groups,
        group_weights: Vec::new(),
        group_barycenters: DMatrix::zeros(0, 0),
    })
}

/// The measure placing each group's mass at its weighted barycenter.
pub fn barycenter_measure(measure: &DiscreteMeasure, plan: &mut GroupPlan) -> Result<DiscreteMeasure> {
    if plan.assignments.len() != measure.len() {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {} atoms, measure has {}",
            plan.assignments.len(),
            measure.len()
        )));
    }
    let dim = measure.dim();
    let mut weights = vec![0.0; plan.group_count];
    let mut centers = DMatrix::zeros(dim, plan.group_count);
    for (i, &g) in plan.assignments.iter().enumerate() {
        let w = measure.weights()[i];
        weights[g] += w;
        centers.column_mut(g).axpy(w, &measure.atom(i), 1.0);
    }
    for (g, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            centers.column_mut(g).unscale_mut(w);
        }
    }
    plan.group_weights = weights.clone();
    plan.group_barycenters = centers.clone();
    DiscreteMeasure::unchecked_sum(centers, weights)
}

/// Shared round loop. `reduce_round(bary, round)` reduces one barycenter
/// measure; its `stats.basis_attempts` and `stats.fallback_rounds` are summed.
fn run_rounds<F>(
    measure: &DiscreteMeasure,
    groups: usize,
    shuffle: Option<u64>,
    method: Method,
    mut reduce_round: F,
) -> Result<RecombinationSolution>
where
    F: FnMut(&DiscreteMeasure, usize) -> Result<RecombinationSolution>,
{
    let dim = measure.dim();
    let mut support: Vec<usize> = (0..measure.len()).filter(|&i| measure.weights()[i] > 0.0).collect();
    let mut weights: Vec<f64> = support.iter().map(|&i| measure.weights()[i]).collect();
    if support.len() <= dim + 1 {
        return RecombinationSolution::new(support, weights, 0, 0, Method::Trivial).canonicalize();
    }
    if groups <= dim + 1 {
        return Err(Error::BadGroupCount { groups, len: support.len() });
    }
    let mut total = RecombinationSolution::new(Vec::new(), Vec::new(), 0, 0, method);
    let mut round = 0;
    while support.len() > dim + 1 {
        if let Some(seed) = shuffle {
            let mut order: Vec<usize> = (0..support.len()).collect();
            order.shuffle(&mut rng_from_seed(derive_seed(seed, &[round as u64, 0x5348])));
            support = order.iter().map(|&k| support[k]).collect();
            weights = order.iter().map(|&k| weights[k]).collect();
        }
        let mut plan = partition_groups(support.len(), groups.min(support.len()))?;
        let current = measure.select(&support, weights.clone())?;
        let bary = barycenter_measure(&current, &mut plan)?;
        let sol = reduce_round(&bary, round)?;

        let ranges = plan.ranges();
        let mut next_support = Vec::new();
        let mut next_weights = Vec::new();
        for (&g, &w_star) in sol.indices.iter().zip(&sol.weights) {
            let factor = w_star / plan.group_weights[g];
            for k in ranges[g].clone() {
                let w = weights[k] * factor;
                if w > 0.0 {
                    next_support.push(support[k]);
                    next_weights.push(w);
                }
            }
        }
        total.stats.round_mass.push(next_weights.iter().sum());
        total.stats.basis_attempts += sol.stats.basis_attempts;
        total.stats.fallback_rounds += sol.stats.fallback_rounds;
        total.tau += sol.tau;
        total.resets += sol.resets;
        support = next_support;
        weights = next_weights;
        round += 1;
    }
    total.stats.rounds = round;
    total.indices = support;
    total.weights = weights;
    total.canonicalize()
}

/// Divide and conquer with `inner` reducing every round's barycenter measure.
pub fn reduce_divide_conquer(
    measure: &DiscreteMeasure,
    inner: &dyn Reducer,
    groups: usize,
    seed: u64,
    shuffle: bool,
) -> Result<RecombinationSolution> {
    run_rounds(measure, groups, shuffle.then_some(seed), Method::DivideConquer, |bary, round| {
        inner.reduce(bary, derive_seed(seed, &[round as u64]))
    })
}

/// Hybrid reduction: every round tries the greedy reducer `trials` times,
/// each from one fresh random basis with `budget_per_trial` iterations, and
/// falls back to the deterministic reducer when all trials fail.
pub fn reduce_hybrid(
    measure: &DiscreteMeasure,
    trials: usize,
    groups: usize,
    budget_per_trial: usize,
    seed: u64,
    shuffle: bool,
) -> Result<RecombinationSolution> {
    run_rounds(measure, groups, shuffle.then_some(seed), Method::Hybrid, |bary, round| {
        hybrid_round(bary, trials, budget_per_trial, derive_seed(seed, &[round as u64]))
    })
}

fn hybrid_round(bary: &DiscreteMeasure, trials: usize, budget: usize, seed: u64) -> Result<RecombinationSolution> {
    let (cloud, support) = match prepare(bary)? {
        Prepared::Done(sol) => return Ok(sol),
        Prepared::Cloud { cloud, support } => (cloud, support),
    };
    let opts = GreedyOptions { max_iterations: budget.max(1), singular_retries: 1, initial_basis: None };
    let mut attempts = 0;
    for trial in 0..trials {
        match reduce_greedy_with(&cloud, derive_seed(seed, &[trial as u64]), &opts) {
            Ok(mut sol) => {
                sol.indices.iter_mut().for_each(|i| *i = support[*i]);
                sol.stats.basis_attempts = attempts + 1;
                return sol.canonicalize();
            }
            Err(e) if e.is_escalation() => attempts += 1,
            Err(e) => return Err(e),
        }
    }
    let mut sol = reduce_deterministic(bary)?;
    sol.stats.fallback_rounds = 1;
    sol.stats.basis_attempts = attempts;
    Ok(sol)
}
