use serde::Serialize;

use super::{is_retryable, reduce_basic, reduce_greedy, Method, RecombinationSolution};
use crate::error::{Error, Result};
use crate::measure::CenteredCloud;
use crate::seed::derive_seed;

/// Hard cap on restarts before `GiveUp`.
pub const MAX_RESETS: usize = 10_000;

/// The `i`-th term (1-based) of the Luby sequence `1,1,2,1,1,2,4,1,...`.
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1, "the Luby sequence starts at 1");
    let mut i = i;
    loop {
        // smallest k with i <= 2^k - 1
        let k = 64 - i.leading_zeros();
        if i == (1u64 << k) - 1 {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Iteration budgets `c * luby(1), c * luby(2), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResetSchedule {
    pub c: usize,
    pub luby_position: u64,
}

impl ResetSchedule {
    pub fn new(c: usize) -> Self {
        Self { c: c.max(1), luby_position: 0 }
    }

    /// `c = 2n`.
    pub fn for_dimension(dim: usize) -> Self {
        Self::new(2 * dim)
    }

    pub fn next_budget(&mut self) -> usize {
        self.luby_position += 1;
        self.c.saturating_mul(luby(self.luby_position) as usize)
    }
}

impl Iterator for ResetSchedule {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_budget())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerReducer {
    Basic,
    Greedy,
}

/// Runs `inner` under the Luby restart schedule. Each attempt draws a fresh
/// basis from the stream `(seed, reset)`; `tau` accumulates over attempts.
pub fn reduce_with_resets(
    cloud: &CenteredCloud,
    seed: u64,
    mut schedule: ResetSchedule,
    inner: InnerReducer,
) -> Result<RecombinationSolution> {
    let mut spent = 0;
    let mut attempts = 0;
    for reset in 0..MAX_RESETS {
        let budget = schedule.next_budget();
        let attempt_seed = derive_seed(seed, &[reset as u64]);
        let outcome = match inner {
            InnerReducer::Basic => reduce_basic(cloud, attempt_seed, budget),
            InnerReducer::Greedy => reduce_greedy(cloud, attempt_seed, budget),
        };
        match outcome {
            Ok(mut sol) => {
                sol.tau += spent;
                sol.resets = reset;
                sol.stats.basis_attempts += attempts;
                if inner == InnerReducer::Greedy {
                    sol.method = Method::GreedyReset;
                }
                return Ok(sol);
            }
            Err(err) if is_retryable(&err) => {
                spent += match err {
                    Error::NotFound { tau } | Error::ActiveExhausted { tau } => tau,
                    _ => 0,
                };
                attempts += 1;
            }
            Err(err) => return Err(err),
        }
    }
    Err(Error::GiveUp { resets: MAX_RESETS })
}
