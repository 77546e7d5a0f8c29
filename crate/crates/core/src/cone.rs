//! Cone bases and sign-pattern membership tests.
//!
//! For `n` linearly independent atoms `B = [x_1 .. x_n]` with `A = B^-1`, an
//! atom `x` lies in the cone of the basis iff `A x >= 0` and in the negative
//! cone iff `A x <= 0`. The basis plus any negative-cone atom supports a
//! convex combination equal to the origin. `A` and the table `A X^T` of all
//! projections are kept current under single-atom swaps by rank-1 updates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::checked_inverse;
use crate::measure::CenteredCloud;

/// Absolute sign tolerance; valid because clouds are unit-normalized.
pub const EPS_CONE: f64 = 1e-10;

/// `|1 + e_slot^T A (x_new - x_slot)|` below this rejects a swap.
pub const DEGENERATE_SWAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ConeBasis {
    indices: Vec<usize>,
    inverse: DMatrix<f64>,
    projections: DMatrix<f64>,
    swap_count: usize,
    rebuild_interval: Option<usize>,
}

impl ConeBasis {
    /// Inverts the basis column matrix and projects every atom of the cloud.
    pub fn build(cloud: &CenteredCloud, indices: &[usize]) -> Result<Self> {
        let dim = cloud.dim();
        if indices.len() != dim {
            return Err(Error::DimensionMismatch(format!("basis of {} atoms in dimension {dim}", indices.len())));
        }
        for (k, &i) in indices.iter().enumerate() {
            if i >= cloud.len() {
                return Err(Error::IndexOutOfRange { index: i, len: cloud.len() });
            }
            if indices[..k].contains(&i) {
                return Err(Error::SingularBasis { ratio: 0.0 });
            }
        }
        let columns = cloud.points().select_columns(indices);
        let inverse = checked_inverse(&columns)?;
        let projections = &inverse * cloud.points();
        Ok(Self {
            indices: indices.to_vec(),
            inverse,
            projections,
            swap_count: 0,
            rebuild_interval: Some(dim),
        })
    }

    /// How many rank-1 swaps may accumulate before a full re-inversion;
    /// `None` disables periodic rebuilds.
    pub fn set_rebuild_interval(&mut self, interval: Option<usize>) {
        self.rebuild_interval = interval.filter(|&k| k > 0);
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// The matrix `A` with `A x_i = e_i` for every basis atom.
    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// `A X^T`; column `j` holds the cone coordinates of atom `j`.
    pub fn projections(&self) -> &DMatrix<f64> {
        &self.projections
    }

    pub fn swap_count(&self) -> usize {
        self.swap_count
    }

    /// Recomputes `A` and the projection table from scratch.
    pub fn rebuild(&mut self, cloud: &CenteredCloud) -> Result<()> {
        let columns = cloud.points().select_columns(&self.indices);
        self.inverse = checked_inverse(&columns)?;
        self.projections = &self.inverse * cloud.points();
        self.swap_count = 0;
        Ok(())
    }

    fn column_all(&self, j: usize, pred: impl Fn(f64) -> bool) -> bool {
        self.projections.column(j).iter().all(|&p| pred(p))
    }

    /// Atoms of `active` in the closed negative cone (every coordinate `<= EPS_CONE`).
    pub fn negative_cone_hits(&self, active: impl IntoIterator<Item = usize>) -> Vec<usize> {
        active
            .into_iter()
            .filter(|&j| self.column_all(j, |p| p <= EPS_CONE))
            .collect()
    }

    /// Atoms of `active` strictly inside the cone (every coordinate `> EPS_CONE`).
    pub fn interior_cone_hits(&self, active: impl IntoIterator<Item = usize>) -> Vec<usize> {
        active
            .into_iter()
            .filter(|&j| self.column_all(j, |p| p > EPS_CONE))
            .collect()
    }

    /// The hit farthest from the boundary of the negative cone: smallest
    /// largest coordinate, ties to the lowest index.
    pub fn deepest_hit(&self, hits: &[usize]) -> Option<usize> {
        let depth = |j: usize| self.projections.column(j).max();
        hits.iter().copied().fold(None, |best: Option<(usize, f64)>, j| {
            let d = depth(j);
            match best {
                Some((bj, bd)) if bd < d || (bd == d && bj < j) => Some((bj, bd)),
                _ => Some((j, d)),
            }
        })
        .map(|(j, _)| j)
    }

    /// Replaces the atom in `slot` with `new_index` by a Sherman-Morrison update
    /// of `A` and of the projection table.
    ///
    /// A degenerate denominator triggers one full re-inversion of the current
    /// basis before the swap is rejected; a rejected swap leaves the basis
    /// unchanged.
    pub fn swap(&mut self, slot: usize, new_index: usize, cloud: &CenteredCloud) -> Result<()> {
        if slot >= self.dim() {
            return Err(Error::IndexOutOfRange { index: slot, len: self.dim() });
        }
        if new_index >= cloud.len() {
            return Err(Error::IndexOutOfRange { index: new_index, len: cloud.len() });
        }
        if self.indices[slot] == new_index {
            return Ok(());
        }
        let mut denom = self.projections[(slot, new_index)];
        if denom.abs() < DEGENERATE_SWAP_TOL {
            self.rebuild(cloud)?;
            denom = self.projections[(slot, new_index)];
            if denom.abs() < DEGENERATE_SWAP_TOL {
                return Err(Error::DegenerateSwap { slot, candidate: new_index });
            }
        }
        let due = self
            .rebuild_interval
            .is_some_and(|k| self.swap_count + 1 >= k);
        if due {
            let mut indices = self.indices.clone();
            indices[slot] = new_index;
            let columns = cloud.points().select_columns(&indices);
            let inverse = checked_inverse(&columns)
                .map_err(|_| Error::DegenerateSwap { slot, candidate: new_index })?;
            self.projections = &inverse * cloud.points();
            self.inverse = inverse;
            self.indices = indices;
            self.swap_count = 0;
            return Ok(());
        }
        // u = A (x_new - x_slot) = A x_new - e_slot
        let mut u: DVector<f64> = self.projections.column(new_index).clone_owned();
        u[slot] -= 1.0;
        let alpha = -1.0 / denom;
        let row_a = self.inverse.row(slot).transpose();
        self.inverse.ger(alpha, &u, &row_a, 1.0);
        let row_p = self.projections.row(slot).transpose();
        self.projections.ger(alpha, &u, &row_p, 1.0);
        self.indices[slot] = new_index;
        self.swap_count += 1;
        Ok(())
    }

    /// Simplex weights on `basis ∪ {star}` whose barycenter is the origin.
    ///
    /// With `p = A x_star` and `c = 1 - sum(p)`, the bordered system
    /// `[[B, x_star], [1^T, 1]] w = e_{n+1}` gives `w_{1..n} = -p / c` and
    /// `w_{n+1} = 1 / c`. Basis weights come first, the star weight last.
    pub fn solve_weights(&self, star: usize) -> Result<Vec<f64>> {
        if star >= self.projections.ncols() {
            return Err(Error::IndexOutOfRange { index: star, len: self.projections.ncols() });
        }
        let p = self.projections.column(star);
        if p.iter().any(|&v| v > EPS_CONE) {
            return Err(Error::NotInNegativeCone(star));
        }
        Ok(weights_from_coordinates(p.as_slice()))
    }
}

/// The closed form behind [`ConeBasis::solve_weights`] for cone coordinates
/// `p = A x_star`.
pub fn weights_from_coordinates(p: &[f64]) -> Vec<f64> {
    let c = 1.0 - p.iter().sum::<f64>();
    let mut w: Vec<f64> = p.iter().map(|&v| -v / c).collect();
    w.push(1.0 / c);
    w
}
