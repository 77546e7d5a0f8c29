#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use recombination::{DiscreteMeasure, RecombinationSolution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian points (columns) shifted by `shift` along every axis.
pub fn gaussian_points(rng: &mut ChaCha8Rng, dim: usize, len: usize, shift: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, len, |_, _| {
        let u: f64 = rng.gen::<f64>() + rng.gen::<f64>() + rng.gen::<f64>() - 1.5;
        2.0 * u + shift
    })
}

pub fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_measure(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> DiscreteMeasure {
    let pts = gaussian_points(rng, dim, len, 0.0);
    let w = random_weights(rng, len);
    DiscreteMeasure::new(pts, w).unwrap()
}

/// `sum_i w_i x_i` over the columns `indices` of `points`.
pub fn combination(points: &DMatrix<f64>, indices: &[usize], weights: &[f64]) -> DVector<f64> {
    let mut acc = DVector::zeros(points.nrows());
    for (&i, &w) in indices.iter().zip(weights) {
        acc += points.column(i) * w;
    }
    acc
}

/// Simplex weights whose combination of the given atoms is the origin.
pub fn assert_zero_barycenter(points: &DMatrix<f64>, sol: &RecombinationSolution, tol: f64) {
    assert!(sol.weights.iter().all(|&w| w >= 0.0), "negative weight in {sol:?}");
    assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= tol);
    let scale = sol.indices.iter().map(|&i| points.column(i).amax()).fold(1.0, f64::max);
    assert!(combination(points, &sol.indices, &sol.weights).amax() <= tol * scale, "barycenter off in {sol:?}");
}
