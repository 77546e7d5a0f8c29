//! Exhaustive ground truth for small instances.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::cone::EPS_CONE;
use crate::error::{Error, Result};

pub const MAX_ORACLE_ATOMS: usize = 12;
pub const MAX_ORACLE_DIM: usize = 4;

const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSupport {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

fn guard(points: &DMatrix<f64>) -> Result<()> {
    if points.ncols() > MAX_ORACLE_ATOMS || points.nrows() > MAX_ORACLE_DIM {
        return Err(Error::TooLarge { atoms: points.ncols(), dim: points.nrows() });
    }
    Ok(())
}

/// Weights on the columns `indices` of `points` that are nonnegative, sum to
/// one and have zero barycenter, if the bordered system has such a solution.
pub fn support_weights(points: &DMatrix<f64>, indices: &[usize]) -> Option<Vec<f64>> {
    let dim = points.nrows();
    let k = indices.len();
    if k == 0 {
        return None;
    }
    let mut system = DMatrix::zeros(dim + 1, k);
    for (c, &i) in indices.iter().enumerate() {
        system.column_mut(c).rows_mut(0, dim).copy_from(&points.column(i));
        system[(dim, c)] = 1.0;
    }
    let mut rhs = DVector::zeros(dim + 1);
    rhs[dim] = 1.0;
    let w = system.clone().svd(true, true).solve(&rhs, 1e-12).ok()?;
    let residual = (&system * &w - &rhs).amax();
    if residual <= RESIDUAL_TOL && w.iter().all(|&v| v >= -EPS_CONE) {
        Some(w.iter().copied().collect())
    } else {
        None
    }
}

/// Every subset of at most `max_support` atoms carrying a probability
/// measure with barycenter zero, in sorted index order.
pub fn enumerate_solutions(points: &DMatrix<f64>, max_support: usize) -> Result<Vec<FeasibleSupport>> {
    guard(points)?;
    let mut found = Vec::new();
    for size in 1..=max_support.min(points.ncols()) {
        for indices in (0..points.ncols()).combinations(size) {
            if let Some(weights) = support_weights(points, &indices) {
                found.push(FeasibleSupport { indices, weights });
            }
        }
    }
    found.sort_by(|a, b| a.indices.cmp(&b.indices));
    Ok(found)
}

/// Whether zero is a convex combination of the columns of `points`.
pub fn contains_zero(points: &DMatrix<f64>) -> Result<bool> {
    guard(points)?;
    // a witness of at most n+1 points exists whenever any does
    for size in 1..=(points.nrows() + 1).min(points.ncols()) {
        if (0..points.ncols()).combinations(size).any(|s| support_weights(points, &s).is_some()) {
            return Ok(true);
        }
    }
    Ok(false)
}
