//! Discrete measures, recentering, and the unit-sphere scaling of atoms.
//!
//! Points are stored column-wise: a measure on `N` atoms in `R^n` holds an
//! `n x N` matrix whose column `j` is atom `j`.

use nalgebra::{DMatrix, DVector, DVectorView};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::recombine::RecombinationSolution;

/// Tolerance on `|sum(weights) - 1|` accepted by [`DiscreteMeasure::new`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Weights in `[-CLIP_TOL, 0)` are rounded to zero; anything lower is an error.
pub const CLIP_TOL: f64 = 1e-10;

/// Relative norm under which a centered atom is treated as the barycenter itself.
pub const ZERO_ATOM_RTOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: DMatrix<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a probability measure from an `n x N` point matrix.
    pub fn new(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = Self::unchecked_sum(points, weights)?;
        let total: f64 = m.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, expected 1")));
        }
        Ok(m)
    }

    /// Like [`DiscreteMeasure::new`] but rescales nonnegative weights to sum to one.
    pub fn normalized(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not positive")));
        }
        let scaled = weights.into_iter().map(|w| w / total).collect();
        Self::unchecked_sum(points, scaled)
    }

    /// Uniform weights `1/N`.
    pub fn uniform(points: DMatrix<f64>) -> Result<Self> {
        let len = points.ncols();
        // exact by construction; a floating-point sum of N copies of 1/N may drift
        Self::unchecked_sum(points, vec![1.0 / len.max(1) as f64; len])
    }

    /// One atom per row.
    pub fn from_rows(rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("rows have different lengths".into()));
        }
        let points = DMatrix::from_fn(dim, rows.len(), |k, j| rows[j][k]);
        Self::new(points, weights)
    }

    pub(crate) fn unchecked_sum(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        let (dim, len) = points.shape();
        if len == 0 || dim == 0 {
            return Err(Error::InvalidMeasure("need at least one atom and one dimension".into()));
        }
        if weights.len() != len {
            return Err(Error::DimensionMismatch(format!("{} weights for {len} atoms", weights.len())));
        }
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("weight {} at atom {i}", weights[i])));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite coordinate".into()));
        }
        Ok(Self { points, weights })
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    /// Number of atoms `N`.
    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atom(&self, i: usize) -> DVectorView<'_, f64> {
        self.points.column(i)
    }

    /// `sum_i w_i x_i`.
    pub fn mean(&self) -> DVector<f64> {
        weighted_mean(&self.points, &self.weights)
    }

    /// Restriction to `indices` with the given weights (not renormalized).
    pub(crate) fn select(&self, indices: &[usize], weights: Vec<f64>) -> Result<Self> {
        let points = self.points.select_columns(indices);
        Self::unchecked_sum(points, weights)
    }
}

pub(crate) fn weighted_mean(points: &DMatrix<f64>, weights: &[f64]) -> DVector<f64> {
    let dim = points.nrows();
    let mut acc = vec![0.0; dim];
    if dim > 0 {
        for (x, &w) in points.as_slice().chunks_exact(dim).zip(weights) {
            if w != 0.0 {
                acc.iter_mut().zip(x).for_each(|(a, v)| *a += w * v);
            }
        }
    }
    DVector::from_vec(acc)
}

/// A recentered point cloud (barycenter at the origin), optionally with every
/// atom scaled onto the unit sphere.
#[derive(Debug, Clone)]
pub struct CenteredCloud {
    points: DMatrix<f64>,
    kappas: Vec<f64>,
    barycenter: DVector<f64>,
    source_weights: Vec<f64>,
    zero_atoms: Vec<usize>,
    scaled: bool,
}

impl CenteredCloud {
    /// Wraps points that the caller already treats as centered.
    ///
    /// No recentering happens: this is how test instances with the origin
    /// outside the convex hull are fed to the reducers.
    pub fn from_points(points: DMatrix<f64>) -> Self {
        let len = points.ncols();
        Self {
            barycenter: DVector::zeros(points.nrows()),
            kappas: vec![1.0; len],
            source_weights: vec![1.0 / len.max(1) as f64; len],
            zero_atoms: Vec::new(),
            scaled: false,
            points,
        }
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, j: usize) -> DVectorView<'_, f64> {
        self.points.column(j)
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn barycenter(&self) -> &DVector<f64> {
        &self.barycenter
    }

    pub fn source_weights(&self) -> &[f64] {
        &self.source_weights
    }

    /// Atoms that coincided with the barycenter when the cloud was scaled.
    pub fn zero_atoms(&self) -> &[usize] {
        &self.zero_atoms
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    /// Centered points with the sphere scaling undone.
    pub fn unscaled_points(&self) -> DMatrix<f64> {
        let mut p = self.points.clone();
        for (j, &k) in self.kappas.iter().enumerate() {
            p.column_mut(j).scale_mut(k);
        }
        p
    }
}

/// Subtracts the weighted mean from every atom.
pub fn center(measure: &DiscreteMeasure) -> CenteredCloud {
    let barycenter = measure.mean();
    let mut points = measure.points().clone();
    if measure.dim() > 0 {
        for x in points.as_mut_slice().chunks_exact_mut(measure.dim()) {
            x.iter_mut().zip(barycenter.iter()).for_each(|(v, b)| *v -= b);
        }
    }
    CenteredCloud {
        kappas: vec![1.0; measure.len()],
        source_weights: measure.weights().to_vec(),
        zero_atoms: Vec::new(),
        scaled: false,
        barycenter,
        points,
    }
}

/// Divides each nonzero atom by its Euclidean norm and records the norm as
/// its kappa. Atoms at the barycenter stay put and are returned alongside.
pub fn normalize_sphere(cloud: &CenteredCloud) -> (CenteredCloud, Vec<usize>) {
    let mut out = cloud.clone();
    if cloud.scaled {
        out.points = cloud.unscaled_points();
    }
    into_sphere(out)
}

/// [`normalize_sphere`] for an unscaled cloud the caller no longer needs.
pub(crate) fn into_sphere(mut cloud: CenteredCloud) -> (CenteredCloud, Vec<usize>) {
    let dim = cloud.dim();
    let norms: Vec<f64> = if dim == 0 {
        vec![0.0; cloud.len()]
    } else {
        cloud.points.as_slice().chunks_exact(dim).map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    };
    let largest = norms.iter().cloned().fold(0.0_f64, f64::max);
    let mut zeros = Vec::new();
    for (j, &norm) in norms.iter().enumerate() {
        if norm <= ZERO_ATOM_RTOL * largest || norm == 0.0 {
            cloud.kappas[j] = 1.0;
            zeros.push(j);
        } else {
            cloud.points.as_mut_slice()[j * dim..(j + 1) * dim].iter_mut().for_each(|v| *v /= norm);
            cloud.kappas[j] = norm;
        }
    }
    cloud.zero_atoms = zeros.clone();
    cloud.scaled = true;
    (cloud, zeros)
}

/// Maps weights found on the sphere-scaled cloud back to the centered cloud:
/// `w_i ∝ w*_i / kappa_i`, renormalized.
pub fn recover_weights(
    scaled_weights: &[f64],
    selected: &[usize],
    kappas: &[f64],
    zero_atoms: &[usize],
) -> Result<Vec<f64>> {
    if scaled_weights.len() != selected.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} atoms",
            scaled_weights.len(),
            selected.len()
        )));
    }
    let mut out = Vec::with_capacity(selected.len());
    for (&w, &i) in scaled_weights.iter().zip(selected) {
        let kappa = *kappas.get(i).ok_or(Error::IndexOutOfRange { index: i, len: kappas.len() })?;
        if zero_atoms.contains(&i) || !(kappa > 0.0) {
            return Err(Error::ZeroKappa(i));
        }
        out.push(w / kappa);
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidMeasure("recovered weights have no mass".into()));
    }
    out.iter_mut().for_each(|w| *w /= total);
    Ok(out)
}

/// Clips weights in `[-CLIP_TOL, 0)` to zero and renormalizes.
pub fn clip_weights(weights: &mut [f64]) -> Result<()> {
    for (i, w) in weights.iter_mut().enumerate() {
        if *w < -CLIP_TOL || !w.is_finite() {
            return Err(Error::NegativeWeight { index: i, weight: *w });
        }
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidMeasure("all weights vanished".into()));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// `|sum_mu w x_k - sum_muhat w x_k|` per coordinate.
    pub moment_errors: Vec<f64>,
    pub max_moment_error: f64,
    pub worst_coordinate: Option<usize>,
    pub max_abs_moment: f64,
    pub support: usize,
    pub min_weight: f64,
    pub weight_sum_deviation: f64,
    pub distinct_indices: bool,
    pub passed: bool,
}

/// Checks that `solution` preserves the moments of `measure` at tolerance `tol`.
pub fn validate_reduction(
    measure: &DiscreteMeasure,
    solution: &RecombinationSolution,
    tol: f64,
) -> Result<ValidationReport> {
    let len = measure.len();
    if let Some(&bad) = solution.indices.iter().find(|&&i| i >= len) {
        return Err(Error::IndexOutOfRange { index: bad, len });
    }
    if solution.indices.len() != solution.weights.len() {
        return Err(Error::DimensionMismatch("indices and weights differ in length".into()));
    }
    let target = measure.mean();
    let mut reduced = DVector::zeros(measure.dim());
    for (&i, &w) in solution.indices.iter().zip(&solution.weights) {
        reduced.axpy(w, &measure.atom(i), 1.0);
    }
    let moment_errors: Vec<f64> = (&target - &reduced).iter().map(|e| e.abs()).collect();
    let (worst_coordinate, max_moment_error) = moment_errors
        .iter()
        .cloned()
        .enumerate()
        .fold((None, 0.0), |(bi, bv), (i, v)| if v > bv || bi.is_none() { (Some(i), v) } else { (bi, bv) });
    let max_abs_moment = target.amax();
    let min_weight = solution.weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let weight_sum_deviation = (solution.weights.iter().sum::<f64>() - 1.0).abs();
    let mut sorted = solution.indices.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let distinct_indices = sorted.len() == solution.indices.len();
    let support = solution.indices.len();
    let passed = max_moment_error <= tol * (1.0 + max_abs_moment)
        && min_weight >= -tol
        && weight_sum_deviation <= tol
        && support <= measure.dim() + 1
        && support > 0
        && distinct_indices;
    Ok(ValidationReport {
        moment_errors,
        max_moment_error,
        worst_coordinate,
        max_abs_moment,
        support,
        min_weight,
        weight_sum_deviation,
        distinct_indices,
        passed,
    })
}
