use nalgebra::DVector;
use rand::seq::index::sample;

use super::{finish, Method, RecombinationSolution};
use crate::cone::{ConeBasis, EPS_CONE};
use crate::error::{Error, Result};
use crate::measure::CenteredCloud;
use crate::seed::rng_from_seed;

/// Knobs for [`reduce_greedy_with`].
#[derive(Debug, Clone)]
pub struct GreedyOptions {
    /// Loop iterations before giving up with `NotFound`.
    pub max_iterations: usize,
    /// Random initial bases to try before `SingularBasisPersistent`.
    pub singular_retries: usize,
    /// Start from these atoms instead of a random sample.
    pub initial_basis: Option<Vec<usize>>,
}

impl GreedyOptions {
    pub fn new(max_iterations: usize) -> Self {
        Self { max_iterations, singular_retries: 100, initial_basis: None }
    }
}

/// The direction that scores candidates for `slot`: the sum of basis atoms
/// `1..n` on the first pass (`slot == 0`), else the sum of slots `0..slot`.
pub fn basis_direction(cloud: &CenteredCloud, basis: &ConeBasis, slot: usize) -> DVector<f64> {
    let mut s = DVector::zeros(cloud.dim());
    let range = if slot == 0 { 1..basis.dim() } else { 0..slot };
    for k in range {
        s += cloud.point(basis.indices()[k]);
    }
    s
}

/// The active atom maximizing `|<x, s> - 1|`, ties to the lowest index.
pub fn select_by_direction(cloud: &CenteredCloud, s: &DVector<f64>, active: &[usize]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in active {
        let score = (cloud.point(j).dot(s) - 1.0).abs();
        best = match best {
            Some((bj, bs)) if bs > score || (bs == score && bj < j) => Some((bj, bs)),
            _ => Some((j, score)),
        };
    }
    best.map(|(j, _)| j).ok_or(Error::EmptyActive)
}

/// Greedy choice of the atom to place in basis slot `slot`.
pub fn greedy_select(cloud: &CenteredCloud, basis: &ConeBasis, slot: usize, active: &[usize]) -> Result<usize> {
    select_by_direction(cloud, &basis_direction(cloud, basis, slot), active)
}

/// Geometrically greedy reduction with the default options.
pub fn reduce_greedy(cloud: &CenteredCloud, seed: u64, max_iterations: usize) -> Result<RecombinationSolution> {
    reduce_greedy_with(cloud, seed, &GreedyOptions::new(max_iterations))
}

fn initial_basis(cloud: &CenteredCloud, seed: u64, opts: &GreedyOptions) -> Result<(ConeBasis, usize)> {
    if let Some(indices) = &opts.initial_basis {
        return ConeBasis::build(cloud, indices)
            .map(|b| (b, 1))
            .map_err(|e| match e {
                Error::SingularBasis { .. } => Error::SingularBasisPersistent { attempts: 1 },
                other => other,
            });
    }
    let mut rng = rng_from_seed(seed);
    let tries = opts.singular_retries.max(1);
    for attempt in 1..=tries {
        let picked = sample(&mut rng, cloud.len(), cloud.dim()).into_vec();
        match ConeBasis::build(cloud, &picked) {
            Ok(b) => return Ok((b, attempt)),
            Err(Error::SingularBasis { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularBasisPersistent { attempts: tries })
}

/// Greedy reduction: a random initial basis, then one slot at a time is
/// replaced by the atom with the widest angle to the rest of the basis while
/// atoms inside the cone are discarded, until the negative cone is hit.
pub fn reduce_greedy_with(cloud: &CenteredCloud, seed: u64, opts: &GreedyOptions) -> Result<RecombinationSolution> {
    let (dim, len) = (cloud.dim(), cloud.len());
    if len <= dim {
        return Err(Error::NotFound { tau: 0 });
    }
    let (mut basis, attempts) = initial_basis(cloud, seed, opts)?;
    let mut active: Vec<usize> = (0..len).filter(|&j| !basis.contains(j)).collect();

    // running sums of basis atoms: all slots, and slots 0..slot
    let mut total = DVector::zeros(dim);
    for &i in basis.indices() {
        total += cloud.point(i);
    }
    let mut prefix = DVector::zeros(dim);

    let mut slot = 0;
    let mut tau = 1;
    loop {
        let hits = basis.negative_cone_hits(active.iter().copied());
        if let Some(star) = basis.deepest_hit(&hits) {
            let mut sol = finish(cloud, &basis, star, tau, Method::Greedy)?;
            sol.stats.basis_attempts = attempts;
            return Ok(sol);
        }
        if tau >= opts.max_iterations {
            return Err(Error::NotFound { tau });
        }
        let projections = basis.projections();
        active.retain(|&j| projections.column(j).iter().any(|&p| p <= EPS_CONE));
        if active.is_empty() {
            return Err(Error::ActiveExhausted { tau });
        }

        let direction = if slot == 0 { &total - cloud.point(basis.indices()[0]) } else { prefix.clone() };
        let replaced = basis.indices()[slot];
        let mut candidates = active.clone();
        let chosen = loop {
            let pick = select_by_direction(cloud, &direction, &candidates)
                .map_err(|_| Error::ActiveExhausted { tau })?;
            match basis.swap(slot, pick, cloud) {
                Ok(()) => break pick,
                Err(Error::DegenerateSwap { .. }) | Err(Error::SingularBasis { .. }) => {
                    candidates.retain(|&j| j != pick);
                }
                Err(e) => return Err(e),
            }
        };
        let pos = active.iter().position(|&j| j == chosen).expect("chosen atom is active");
        active.swap_remove(pos);
        active.push(replaced);

        total += cloud.point(chosen);
        total -= cloud.point(replaced);
        slot = (slot + 1) % dim;
        if slot == 0 {
            prefix.fill(0.0);
        } else {
            prefix += cloud.point(chosen);
        }
        tau += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn cloud2(cols: &[[f64; 2]]) -> CenteredCloud {
        let flat: Vec<f64> = cols.iter().flat_map(|c| c.iter().copied()).collect();
        CenteredCloud::from_points(DMatrix::from_column_slice(2, cols.len(), &flat))
    }

    #[test]
    fn antipode_has_the_largest_score() {
        let c = cloud2(&[[0.0, 1.0], [-1.0, 0.0], [0.6, 0.8]]);
        let s = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(select_by_direction(&c, &s, &[0, 1, 2]).unwrap(), 1);
        assert_eq!(select_by_direction(&c, &s, &[2]).unwrap(), 2);
        assert_eq!(select_by_direction(&c, &s, &[]), Err(Error::EmptyActive));
    }

    #[test]
    fn ties_go_to_the_lower_index() {
        let c = cloud2(&[[0.0, 1.0], [0.0, -1.0]]);
        let s = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(select_by_direction(&c, &s, &[1, 0]).unwrap(), 0);
    }

    #[test]
    fn direction_skips_first_slot_on_first_pass() {
        let c = CenteredCloud::from_points(DMatrix::identity(3, 3));
        let b = ConeBasis::build(&c, &[0, 1, 2]).unwrap();
        assert_eq!(basis_direction(&c, &b, 0).as_slice(), &[0.0, 1.0, 1.0]);
        assert_eq!(basis_direction(&c, &b, 2).as_slice(), &[1.0, 1.0, 0.0]);
    }

    #[test]
    fn triangle_matches_basic() {
        let c = cloud2(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]);
        let sol = reduce_greedy(&c, 11, 10).unwrap();
        let mut idx = sol.indices.clone();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2]);
        assert!(sol.weights.iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn infeasible_cloud_escalates() {
        let c = cloud2(&[[1.0, 0.1], [1.0, 0.5], [2.0, -0.3], [0.5, 0.9], [1.0, -1.0]]);
        for seed in 0..10 {
            let err = reduce_greedy(&c, seed, 100).unwrap_err();
            assert!(err.is_escalation(), "{err:?}");
        }
    }

    #[test]
    fn rank_deficient_cloud_is_persistently_singular() {
        let c = cloud2(&[[1.0, 1.0], [-1.0, -1.0], [2.0, 2.0], [-0.5, -0.5]]);
        assert_eq!(
            reduce_greedy(&c, 0, 10).unwrap_err(),
            Error::SingularBasisPersistent { attempts: 100 }
        );
    }
}
