//! Seeded synthetic data for benchmarks and tests.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::seed::{derive_seed, rng_from_seed, Rng};

fn normal_matrix(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform measure on `len` standard Gaussian points in `R^dim`.
pub fn gaussian(dim: usize, len: usize, seed: u64) -> Result<DiscreteMeasure> {
    DiscreteMeasure::uniform(normal_matrix(dim, len, &mut rng_from_seed(seed)))
}

/// Signs used by [`exp_mixture`] for a given run seed.
pub fn exp_mixture_signs(dim: usize, run_seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(derive_seed(run_seed, &[0x5167]));
    (0..dim).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Uniform measure on points whose coordinate `k` is `signs[k] * Exp(1)`.
pub fn exp_mixture(signs: &[f64], len: usize, seed: u64) -> Result<DiscreteMeasure> {
    let mut rng = rng_from_seed(seed);
    let pts = DMatrix::from_fn(signs.len(), len, |k, _| signs[k] * rng.sample::<f64, _>(Exp1));
    DiscreteMeasure::uniform(pts)
}

/// Gaussian points whose last coordinate repeats the first, so every basis
/// of `dim` atoms is singular.
pub fn rank_deficient(dim: usize, len: usize, seed: u64) -> Result<DiscreteMeasure> {
    if dim < 2 {
        return Err(Error::DimensionMismatch("need at least two coordinates to duplicate one".into()));
    }
    let mut pts = normal_matrix(dim, len, &mut rng_from_seed(seed));
    let first = pts.row(0).into_owned();
    pts.row_mut(dim - 1).copy_from(&first);
    DiscreteMeasure::uniform(pts)
}

/// `k` points drawn uniformly from the unit sphere in `R^dim`, as columns.
pub fn sphere_points(dim: usize, k: usize, rng: &mut Rng) -> DMatrix<f64> {
    let mut pts = normal_matrix(dim, k, rng);
    for mut c in pts.column_iter_mut() {
        let norm = c.norm();
        if norm > 0.0 {
            c.unscale_mut(norm);
        }
    }
    pts
}

/// Regression data `Y = X theta + 0.1 noise` with Gaussian `X` (`len x d`).
pub fn regression(len: usize, d: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>, DVector<f64>) {
    let mut rng = rng_from_seed(seed);
    let theta = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = normal_matrix(len, d, &mut rng);
    let noise = normal_matrix(len, 1, &mut rng);
    let y = (&x * &theta).iter().zip(noise.iter()).map(|(a, e)| a + 0.1 * e).collect();
    (x, y, theta)
}

/// Benchmark point generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Gauss15,
    Gauss20,
    ExpMix20,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Gauss15, Generator::Gauss20, Generator::ExpMix20];

    pub fn dim(self) -> usize {
        match self {
            Generator::Gauss15 => 15,
            Generator::Gauss20 | Generator::ExpMix20 => 20,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Gauss15 => "gauss15",
            Generator::Gauss20 => "gauss20",
            Generator::ExpMix20 => "expmix20",
        }
    }

    /// One instance; `run_seed` fixes anything shared across the whole run
    /// (the sign pattern of `expmix20`).
    pub fn sample(self, len: usize, seed: u64, run_seed: u64) -> Result<DiscreteMeasure> {
        match self {
            Generator::Gauss15 | Generator::Gauss20 => gaussian(self.dim(), len, seed),
            Generator::ExpMix20 => exp_mixture(&exp_mixture_signs(self.dim(), run_seed), len, seed),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown generator `{s}` (expected gauss15, gauss20 or expmix20)"))
    }
}
