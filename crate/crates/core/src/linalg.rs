//! Small dense helpers shared by the cone and the deterministic reducer.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Smallest/largest pivot magnitude below which a basis counts as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Inverts a square matrix through a partially pivoted LU factorization,
/// rejecting it when the pivot ratio falls below [`SINGULAR_PIVOT_RATIO`].
pub fn checked_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    debug_assert!(m.is_square());
    let lu = m.clone().lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for k in 0..u.nrows() {
        let p = u[(k, k)].abs();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(ratio >= SINGULAR_PIVOT_RATIO) {
        return Err(Error::SingularBasis { ratio });
    }
    lu.try_inverse().ok_or(Error::SingularBasis { ratio })
}

/// Basis of the right kernel of `m` from a fully pivoted reduction to row
/// echelon form.
///
/// One vector is returned per free column, in increasing column order. Each
/// vector has a 1 at its own free column and 0 at every other free column.
pub fn kernel_basis(m: &DMatrix<f64>, rel_tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = m.shape();
    // row-major copy: row operations below run over contiguous memory
    let mut a = vec![0.0; rows * cols];
    for (c, col) in m.column_iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            a[r * cols + c] = v;
        }
    }
    let scale = a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = rel_tol * scale;
    // perm[k] = original column stored at position k
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while scale > 0.0 && rank < rows.min(cols) {
        let mut best = (rank, rank, 0.0_f64);
        for r in rank..rows {
            for (c, v) in a[r * cols + rank..(r + 1) * cols].iter().enumerate() {
                if v.abs() > best.2 {
                    best = (r, rank + c, v.abs());
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        if best.0 != rank {
            let (lo, hi) = a.split_at_mut(best.0 * cols);
            lo[rank * cols..(rank + 1) * cols].swap_with_slice(&mut hi[..cols]);
        }
        if best.1 != rank {
            for r in 0..rows {
                a.swap(r * cols + rank, r * cols + best.1);
            }
            perm.swap(rank, best.1);
        }
        let (before, rest) = a.split_at_mut(rank * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        let inv = 1.0 / pivot_row[rank];
        pivot_row[rank..].iter_mut().for_each(|v| *v *= inv);
        pivot_row[rank] = 1.0;
        for row in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)) {
            let f = row[rank];
            if f != 0.0 {
                row[rank..].iter_mut().zip(&pivot_row[rank..]).for_each(|(x, p)| *x -= f * p);
                row[rank] = 0.0;
            }
        }
        rank += 1;
    }
    let mut free: Vec<(usize, usize)> = (rank..cols).map(|k| (perm[k], k)).collect();
    free.sort_unstable();
    free.into_iter()
        .map(|(col, k)| {
            let mut v = vec![0.0; cols];
            v[col] = 1.0;
            for r in 0..rank {
                v[perm[r]] = -a[r * cols + k];
            }
            v
        })
        .collect()
}
