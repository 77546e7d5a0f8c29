//! Reusing a previous solution when a similar instance is solved again.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::cone::EPS_CONE;
use crate::error::{Error, Result};
use crate::linalg::checked_inverse;
use crate::measure::CenteredCloud;
use crate::seed::rng_from_seed;

/// For each of the first `n` rows of `previous_points`, the nearest atom of
/// `cloud` not picked yet. Missing rows are filled with random unused atoms.
pub fn warm_start_basis(cloud: &CenteredCloud, previous_points: &DMatrix<f64>, seed: u64) -> Vec<usize> {
    let (dim, len) = (cloud.dim(), cloud.len());
    let want = dim.min(len);
    let mut used = vec![false; len];
    let mut picked = Vec::with_capacity(want);
    for row in previous_points.row_iter().take(want) {
        let target = row.transpose();
        let nearest = (0..len)
            .filter(|&j| !used[j])
            .map(|j| (j, (cloud.point(j) - &target).norm_squared()))
            .fold(None, |best: Option<(usize, f64)>, (j, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((j, d)),
            });
        if let Some((j, _)) = nearest {
            used[j] = true;
            picked.push(j);
        }
    }
    if picked.len() < want {
        let mut rest: Vec<usize> = (0..len).filter(|&j| !used[j]).collect();
        rest.shuffle(&mut rng_from_seed(seed));
        picked.extend(rest.into_iter().take(want - picked.len()));
    }
    picked
}

/// A solved instance kept for re-checking under perturbations: the star atom
/// `x_1`, the remaining `n` atoms, and `A_1 = (X_{-1}^T)^{-1}` computed once.
#[derive(Debug, Clone)]
pub struct PreviousSolution {
    star: DVector<f64>,
    rest: DMatrix<f64>,
    a1: DMatrix<f64>,
}

impl PreviousSolution {
    /// `rest` holds one atom per row (`n x n`).
    pub fn new(star: DVector<f64>, rest: DMatrix<f64>) -> Result<Self> {
        let dim = star.len();
        if rest.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!("expected {dim}x{dim} basis rows, got {:?}", rest.shape())));
        }
        let a1 = checked_inverse(&rest.transpose())?;
        Ok(Self { star, rest, a1 })
    }

    pub fn star(&self) -> &DVector<f64> {
        &self.star
    }

    pub fn rest(&self) -> &DMatrix<f64> {
        &self.rest
    }

    /// Whether the previous solution is still one for the original points
    /// (`A_1 x_1 <= 0`).
    pub fn is_feasible(&self) -> bool {
        (&self.a1 * &self.star).iter().all(|&v| v <= EPS_CONE)
    }
}

/// Whether the previous solution atoms, moved to `X R + E`, still solve the
/// recombination problem.
///
/// `perturbation` has `n + 1` rows: the star first, then the basis rows. The
/// new inverse comes from the stored `A_1` through the Woodbury identity
/// `(P + E R^-1)^-1 = P^-1 - P^-1 E (I + R^-1 P^-1 E)^-1 R^-1 P^-1` with
/// `P^-1 = A_1^T`, so only the `n x n` inner matrix is inverted afresh.
pub fn woodbury_feasibility(prev: &PreviousSolution, rotation: &DMatrix<f64>, perturbation: &DMatrix<f64>) -> Result<bool> {
    let dim = prev.star.len();
    if rotation.shape() != (dim, dim) || perturbation.shape() != (dim + 1, dim) {
        return Err(Error::DimensionMismatch("R must be n x n and E (n+1) x n".into()));
    }
    let r_inv = checked_inverse(rotation)?;
    let e_star = perturbation.row(0);
    let e_rest = perturbation.rows(1, dim);
    let p_inv = prev.a1.transpose();

    let inner = DMatrix::identity(dim, dim) + &r_inv * &p_inv * e_rest;
    let inner_inv = checked_inverse(&inner).map_err(|_| Error::SingularPerturbation)?;
    let moved_inv = &p_inv - &p_inv * e_rest * inner_inv * &r_inv * &p_inv;

    // coefficients of the moved star in the moved basis, as a row vector
    let star_row = prev.star.transpose() + e_star * &r_inv;
    let coeffs = star_row * moved_inv;
    Ok(coeffs.iter().all(|&v| v <= EPS_CONE))
}
