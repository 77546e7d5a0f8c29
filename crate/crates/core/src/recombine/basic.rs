use rand::seq::index::sample;

use super::{finish_weights, Method, RecombinationSolution};
use crate::cone::{weights_from_coordinates, EPS_CONE};
use crate::error::{Error, Result};
use crate::linalg::checked_inverse;
use crate::measure::CenteredCloud;
use crate::seed::rng_from_seed;

/// Samples uniformly random bases until one has a nonempty negative cone,
/// and completes it with the lowest-index hit.
///
/// Singular samples count as rounds. `tau` is the number of rounds used.
pub fn reduce_basic(cloud: &CenteredCloud, seed: u64, max_iterations: usize) -> Result<RecombinationSolution> {
    let (dim, len) = (cloud.dim(), cloud.len());
    if len <= dim {
        return Err(Error::NotFound { tau: 0 });
    }
    let mut rng = rng_from_seed(seed);
    let mut in_basis = vec![false; len];
    for round in 1..=max_iterations {
        let picked = sample(&mut rng, len, dim).into_vec();
        let inverse = match checked_inverse(&cloud.points().select_columns(&picked)) {
            Ok(a) => a,
            Err(Error::SingularBasis { .. }) => continue,
            Err(e) => return Err(e),
        };
        // rows of A as contiguous columns; most atoms fail on the first rows
        let rows = inverse.transpose();
        let (rows, pts) = (rows.as_slice(), cloud.points().as_slice());
        let coordinate = |k: usize, j: usize| dot(&rows[k * dim..(k + 1) * dim], &pts[j * dim..(j + 1) * dim]);
        picked.iter().for_each(|&i| in_basis[i] = true);
        let hit = (0..len).find(|&j| !in_basis[j] && (0..dim).all(|k| coordinate(k, j) <= EPS_CONE));
        picked.iter().for_each(|&i| in_basis[i] = false);
        if let Some(star) = hit {
            let p: Vec<f64> = (0..dim).map(|k| coordinate(k, star)).collect();
            let mut indices = picked;
            indices.push(star);
            let mut sol = finish_weights(cloud, indices, weights_from_coordinates(&p), round, Method::Basic)?;
            sol.stats.basis_attempts = round;
            return Ok(sol);
        }
    }
    Err(Error::NotFound { tau: max_iterations })
}

/// Dot product with four independent accumulators.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(u, v)| u * v).sum();
    for (u, v) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += u[k] * v[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
