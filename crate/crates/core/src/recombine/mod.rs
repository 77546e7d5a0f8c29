//! Randomized reducers: uniform basis resampling, the geometrically greedy
//! variant with interior pruning, Las Vegas resets, and warm starts.

mod basic;
mod greedy;
mod resets;
mod warm;

use std::fmt;

use serde::Serialize;

pub use basic::reduce_basic;
pub use greedy::{basis_direction, greedy_select, reduce_greedy, reduce_greedy_with, select_by_direction, GreedyOptions};
pub use resets::{luby, reduce_with_resets, InnerReducer, ResetSchedule, MAX_RESETS};
pub use warm::{warm_start_basis, woodbury_feasibility, PreviousSolution};

use crate::cone::ConeBasis;
use crate::error::{Error, Result};
use crate::measure::{self, center, clip_weights, into_sphere, CenteredCloud, DiscreteMeasure};

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Basic,
    Greedy,
    GreedyReset,
    Deterministic,
    DivideConquer,
    Hybrid,
    Trivial,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Basic => "basic",
            Method::Greedy => "greedy",
            Method::GreedyReset => "greedy-reset",
            Method::Deterministic => "deterministic",
            Method::DivideConquer => "divide-conquer",
            Method::Hybrid => "hybrid",
            Method::Trivial => "trivial",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bookkeeping that is not part of the reduced measure itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReductionStats {
    /// Randomly sampled cone bases that were inverted (successfully or not).
    pub basis_attempts: usize,
    /// Divide-and-conquer rounds.
    pub rounds: usize,
    /// Rounds that had to fall back to the deterministic reducer.
    pub fallback_rounds: usize,
    /// Total mass of the recalibrated weights after each round.
    pub round_mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecombinationSolution {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    /// Main-loop iterations (basis samplings for `basic`, loop passes for
    /// `greedy`, elimination steps for `deterministic`).
    pub tau: usize,
    pub resets: usize,
    pub method: Method,
    pub stats: ReductionStats,
}

impl RecombinationSolution {
    pub fn new(indices: Vec<usize>, weights: Vec<f64>, tau: usize, resets: usize, method: Method) -> Self {
        Self { indices, weights, tau, resets, method, stats: ReductionStats::default() }
    }

    pub fn support(&self) -> usize {
        self.indices.len()
    }

    pub fn fallback_used(&self) -> bool {
        self.stats.fallback_rounds > 0
    }

    /// Clips round-off negatives, drops zero weights and sorts by index.
    pub(crate) fn canonicalize(mut self) -> Result<Self> {
        clip_weights(&mut self.weights)?;
        let mut pairs: Vec<(usize, f64)> = self
            .indices
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        pairs.sort_unstable_by_key(|&(i, _)| i);
        self.indices = pairs.iter().map(|p| p.0).collect();
        self.weights = pairs.iter().map(|p| p.1).collect();
        Ok(self)
    }
}

/// Builds the solution for `basis ∪ {star}`, mapping weights found on a
/// sphere-scaled cloud back to the unscaled one.
pub(crate) fn finish(
    cloud: &CenteredCloud,
    basis: &ConeBasis,
    star: usize,
    tau: usize,
    method: Method,
) -> Result<RecombinationSolution> {
    let scaled = basis.solve_weights(star)?;
    let mut indices = basis.indices().to_vec();
    indices.push(star);
    finish_weights(cloud, indices, scaled, tau, method)
}

/// Like [`finish`] for weights already solved on `indices` (star last).
pub(crate) fn finish_weights(
    cloud: &CenteredCloud,
    indices: Vec<usize>,
    scaled: Vec<f64>,
    tau: usize,
    method: Method,
) -> Result<RecombinationSolution> {
    let weights = if cloud.is_scaled() {
        measure::recover_weights(&scaled, &indices, cloud.kappas(), cloud.zero_atoms())?
    } else {
        scaled
    };
    Ok(RecombinationSolution::new(indices, weights, tau, 0, method))
}

/// What a measure looks like once zero-weight atoms are gone.
pub(crate) enum Prepared {
    /// Nothing to reduce; the solution is already in original indices.
    Done(RecombinationSolution),
    /// A centered, sphere-scaled cloud over `support` (original indices).
    Cloud { cloud: CenteredCloud, support: Vec<usize> },
}

/// Drops zero weights, passes small measures through, recenters and scales.
/// An atom sitting exactly on the barycenter is returned alone with weight 1.
pub(crate) fn prepare(measure: &DiscreteMeasure) -> Result<Prepared> {
    let support: Vec<usize> = (0..measure.len()).filter(|&i| measure.weights()[i] > 0.0).collect();
    if support.len() <= measure.dim() + 1 {
        let weights = support.iter().map(|&i| measure.weights()[i]).collect();
        let sol = RecombinationSolution::new(support, weights, 0, 0, Method::Trivial);
        return sol.canonicalize().map(Prepared::Done);
    }
    let reduced;
    let active = if support.len() == measure.len() {
        measure
    } else {
        let w = support.iter().map(|&i| measure.weights()[i]).collect();
        reduced = measure.select(&support, w)?;
        &reduced
    };
    let (cloud, zeros) = into_sphere(center(active));
    if let Some(&z) = zeros.first() {
        let sol = RecombinationSolution::new(vec![support[z]], vec![1.0], 0, 0, Method::Trivial);
        return Ok(Prepared::Done(sol));
    }
    Ok(Prepared::Cloud { cloud, support })
}

/// Runs a cloud-level reducer on a measure and maps the answer back to the
/// measure's indices.
pub fn reduce_measure_with<F>(measure: &DiscreteMeasure, run: F) -> Result<RecombinationSolution>
where
    F: FnOnce(&CenteredCloud) -> Result<RecombinationSolution>,
{
    match prepare(measure)? {
        Prepared::Done(sol) => Ok(sol),
        Prepared::Cloud { cloud, support } => {
            let mut sol = run(&cloud)?;
            for i in sol.indices.iter_mut() {
                *i = support[*i];
            }
            sol.canonicalize()
        }
    }
}

/// Errors that mean "this attempt failed, try another basis".
pub(crate) fn is_retryable(err: &Error) -> bool {
    matches!(err, Error::NotFound { .. } | Error::ActiveExhausted { .. })
}
