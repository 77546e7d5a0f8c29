//! Least-squares coresets.
//!
//! Reducing the uniform measure on the rows `z z^T` (upper triangle) of the
//! augmented data `(X|Y)` keeps `(X|Y)^T (X|Y)` exactly, so every residual
//! `|Xw - Y|^2` and hence the minimizer are unchanged on the coreset.
//! Callers wanting an intercept append a column of ones to `X` themselves.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::recombine::{Method, RecombinationSolution};
use crate::registry::Reducer;

/// Number of distinct products `z_a z_b`, `a <= b`, for rows of length `width`.
pub fn feature_dim(width: usize) -> usize {
    width * (width + 1) / 2
}

/// Products `z_a z_b` for `a <= b`, ordered by `a` then `b`.
pub fn moment_features(z: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(feature_dim(z.len()));
    for (a, &za) in z.iter().enumerate() {
        out.extend(z[a..].iter().map(|&zb| za * zb));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsqCoreset {
    pub row_indices: Vec<usize>,
    /// `sqrt(N w_i)` for every selected row.
    pub row_scales: Vec<f64>,
    pub method: Method,
    pub tau: usize,
    pub fallback_used: bool,
}

impl LsqCoreset {
    /// The selected rows of `x` and `y`, each multiplied by its scale.
    pub fn scaled_rows(&self, x: &DMatrix<f64>, y: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let xs = DMatrix::from_fn(self.row_indices.len(), x.ncols(), |r, c| x[(self.row_indices[r], c)] * self.row_scales[r]);
        let ys = DVector::from_iterator(
            self.row_indices.len(),
            self.row_indices.iter().zip(&self.row_scales).map(|(&i, &s)| y[i] * s),
        );
        (xs, ys)
    }

    pub fn len(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_indices.is_empty()
    }
}

fn check_shapes(x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!("X has {} rows, Y has {} entries", x.nrows(), y.len())));
    }
    if x.ncols() == 0 {
        return Err(Error::DimensionMismatch("X has no columns".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidMeasure("non-finite data entry".into()));
    }
    Ok(())
}

/// Reduces the rows of `(X|Y)` to at most `(d+1)(d+2)/2 + 1` scaled rows
/// with the same normal-equations matrix.
pub fn build_coreset(x: &DMatrix<f64>, y: &[f64], reducer: &dyn Reducer, seed: u64) -> Result<LsqCoreset> {
    check_shapes(x, y)?;
    let (len, width) = (x.nrows(), x.ncols() + 1);
    let dim = feature_dim(width);
    if len <= dim + 1 {
        return Ok(LsqCoreset {
            row_indices: (0..len).collect(),
            row_scales: vec![1.0; len],
            method: Method::Trivial,
            tau: 0,
            fallback_used: false,
        });
    }
    let mut features = DMatrix::zeros(dim, len);
    let mut z = vec![0.0; width];
    for i in 0..len {
        z[..width - 1].iter_mut().zip(x.row(i).iter()).for_each(|(a, &b)| *a = b);
        z[width - 1] = y[i];
        features.column_mut(i).copy_from_slice(&moment_features(&z));
    }
    let measure = DiscreteMeasure::uniform(features)?;
    let sol: RecombinationSolution = reducer.reduce(&measure, seed)?;
    let scale = len as f64;
    Ok(LsqCoreset {
        row_scales: sol.weights.iter().map(|&w| (scale * w).sqrt()).collect(),
        fallback_used: sol.fallback_used(),
        method: sol.method,
        tau: sol.tau,
        row_indices: sol.indices,
    })
}

/// `(X|Y)^T (X|Y)`.
pub fn normal_matrix(x: &DMatrix<f64>, y: &[f64]) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(x.nrows(), x.ncols() + 1);
    z.columns_mut(0, x.ncols()).copy_from(x);
    z.column_mut(x.ncols()).copy_from_slice(y);
    z.tr_mul(&z)
}

/// Least-squares minimizer of `|Xw - Y|^2` via the normal equations.
pub fn solve_least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let gram = x.tr_mul(x);
    let rhs = x.tr_mul(y);
    let chol = gram.clone().cholesky().ok_or(Error::RankDeficient)?;
    let diag_max = gram.diagonal().amax();
    let diag_min = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if diag_max == 0.0 || diag_min * diag_min <= 1e-14 * diag_max {
        return Err(Error::RankDeficient);
    }
    Ok(chol.solve(&rhs))
}

/// Minimizer over the coreset rows.
pub fn solve_reduced(x: &DMatrix<f64>, y: &[f64], coreset: &LsqCoreset) -> Result<DVector<f64>> {
    check_shapes(x, y)?;
    let (xs, ys) = coreset.scaled_rows(x, y);
    solve_least_squares(&xs, &ys)
}

/// `|Xw - Y|^2`.
pub fn residual(x: &DMatrix<f64>, y: &[f64], w: &DVector<f64>) -> f64 {
    (x * w - DVector::from_column_slice(y)).norm_squared()
}
