//! Deterministic reduction by repeated kernel-vector weight elimination.
//!
//! Any `v != 0` with `sum_i v_i x_i = 0` and `sum_i v_i = 0` can be subtracted
//! from the weights without changing the mean or the mass. Scaling it so the
//! first weight hits zero keeps every weight nonnegative and removes at least
//! one atom. Kernel vectors are taken from a window of `2(n+1)` atoms at a
//! time, so each factorization is small and yields about `n+1` eliminations.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::cone::DEGENERATE_SWAP_TOL;
use crate::linalg::{checked_inverse, kernel_basis};
use crate::measure::{center, DiscreteMeasure};
use crate::recombine::{Method, RecombinationSolution};

/// Weights at or below this after an elimination step are removed exactly.
pub const ZERO_WEIGHT_TOL: f64 = 1e-14;

const RANK_RTOL: f64 = 1e-12;

pub fn reduce_deterministic(measure: &DiscreteMeasure) -> Result<RecombinationSolution> {
    let dim = measure.dim();
    let support: Vec<usize> = (0..measure.len()).filter(|&i| measure.weights()[i] > 0.0).collect();
    if support.len() <= dim + 1 {
        let weights = support.iter().map(|&i| measure.weights()[i]).collect();
        return RecombinationSolution::new(support, weights, 0, 0, Method::Trivial).canonicalize();
    }
    let cloud = center(measure);
    let mut weights = measure.weights().to_vec();
    let (kept, steps) = eliminate(cloud.points(), &mut weights, &support);
    let kept_weights = kept.iter().map(|&i| weights[i]).collect();
    RecombinationSolution::new(kept, kept_weights, steps, 0, Method::Deterministic).canonicalize()
}

/// Eliminates atoms of `support` until at most `n+1` remain. Returns the
/// surviving atoms and the number of elimination steps.
///
/// While the bordered matrix of the `n+1` current survivors is invertible,
/// atoms are brought in one at a time: the kernel vector of survivors plus
/// the new atom `y` is `(-B^-1 [y; 1], 1)`, and `B^-1` follows each exchange
/// by a rank-1 update. A singular survivor block hands the remaining atoms to
/// the windowed elimination.
pub(crate) fn eliminate(points: &DMatrix<f64>, weights: &mut [f64], support: &[usize]) -> (Vec<usize>, usize) {
    let dim = points.nrows();
    let size = dim + 1;
    if support.len() <= size {
        return (support.to_vec(), 0);
    }
    let mut survivors = support[..size].to_vec();
    let Some(mut inverse) = bordered_inverse(points, &survivors) else {
        return eliminate_windowed(points, weights, support);
    };
    let pts = points.as_slice();
    let mut c = vec![0.0; size];
    let mut pivot_row = vec![0.0; size];
    let mut steps = 0;
    let mut exchanges = 0;
    for (k, &new) in support.iter().enumerate().skip(size) {
        // c = B^-1 [y; 1], with B^-1 stored column-major
        let y = &pts[new * dim..(new + 1) * dim];
        let inv = inverse.as_slice();
        c.copy_from_slice(&inv[dim * size..]);
        for (col, &v) in y.iter().enumerate() {
            c.iter_mut().zip(&inv[col * size..(col + 1) * size]).for_each(|(a, b)| *a += v * b);
        }
        // kernel vector over (survivors, new) is (-c, 1); first nonzero entry positive
        let sign = match c.iter().find(|&&v| v != 0.0) {
            Some(&v) if v > 0.0 => -1.0,
            _ => 1.0,
        };
        let entry = |slot: usize| if slot < size { -sign * c[slot] } else { sign };
        let (pivot, t) = (0..=size)
            .filter(|&slot| entry(slot) > 0.0)
            .map(|slot| (slot, weights[if slot < size { survivors[slot] } else { new }] / entry(slot)))
            .fold((usize::MAX, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best });
        steps += 1;
        if pivot == usize::MAX {
            // c = 0 and the new atom coincides with nothing removable
            continue;
        }
        for slot in 0..=size {
            let atom = if slot < size { survivors[slot] } else { new };
            let w = &mut weights[atom];
            *w -= t * entry(slot);
            if slot == pivot || *w <= ZERO_WEIGHT_TOL {
                *w = 0.0;
            }
        }
        if pivot == size {
            continue;
        }
        // the new atom takes the pivot's place in B
        survivors[pivot] = new;
        exchanges += 1;
        let denom = c[pivot];
        if exchanges % size == 0 || denom.abs() < DEGENERATE_SWAP_TOL {
            match bordered_inverse(points, &survivors) {
                Some(fresh) => inverse = fresh,
                None => {
                    let mut rest = survivors.clone();
                    rest.extend_from_slice(&support[k + 1..]);
                    rest.retain(|&i| weights[i] > 0.0);
                    let (kept, more) = eliminate_windowed(points, weights, &rest);
                    return (kept, steps + more);
                }
            }
            continue;
        }
        // B'^-1 = B^-1 - (c - e_p) row_p(B^-1) / c_p
        let inv = inverse.as_mut_slice();
        for col in 0..size {
            pivot_row[col] = inv[col * size + pivot];
        }
        c[pivot] -= 1.0;
        for col in 0..size {
            let f = pivot_row[col] / denom;
            if f != 0.0 {
                inv[col * size..(col + 1) * size].iter_mut().zip(&c).for_each(|(a, b)| *a -= f * b);
            }
        }
    }
    survivors.retain(|&i| weights[i] > 0.0);
    survivors.sort_unstable();
    (survivors, steps)
}

/// Inverse of the `(n+1) x (n+1)` matrix with columns `[x_i; 1]`.
fn bordered_inverse(points: &DMatrix<f64>, atoms: &[usize]) -> Option<DMatrix<f64>> {
    let dim = points.nrows();
    let mut b = DMatrix::zeros(dim + 1, atoms.len());
    for (c, &i) in atoms.iter().enumerate() {
        b.column_mut(c).rows_mut(0, dim).copy_from(&points.column(i));
        b[(dim, c)] = 1.0;
    }
    checked_inverse(&b).ok()
}

/// Eliminates atoms of `support` until at most `n+1` remain, factorizing
/// windows of `2(n+1)` atoms. Returns the surviving atoms and the number of
/// elimination steps.
fn eliminate_windowed(points: &DMatrix<f64>, weights: &mut [f64], support: &[usize]) -> (Vec<usize>, usize) {
    let dim = points.nrows();
    let window_size = 2 * (dim + 1);
    let mut pending = support.iter().copied();
    let mut window: Vec<usize> = Vec::with_capacity(window_size);
    let mut remaining = support.len();
    let mut steps = 0;

    while remaining > dim + 1 {
        window.extend(pending.by_ref().take(window_size - window.len()));
        let m = window.len();
        let mut bordered = DMatrix::zeros(dim + 1, m);
        for (c, &i) in window.iter().enumerate() {
            bordered.column_mut(c).rows_mut(0, dim).copy_from(&points.column(i));
            bordered[(dim, c)] = 1.0;
        }
        let mut kernel = kernel_basis(&bordered, RANK_RTOL);
        if kernel.is_empty() {
            // m <= rank <= n+1 and nothing left to pull in
            break;
        }
        let mut alive = vec![true; m];
        while remaining > dim + 1 {
            // last factorization column first
            let Some(mut v) = kernel.pop() else { break };
            // orientation: first nonzero entry positive
            if v.iter().find(|&&x| x != 0.0).is_some_and(|&x| x < 0.0) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let (pivot, t) = v
                .iter()
                .enumerate()
                .filter(|&(c, &x)| x > 0.0 && alive[c])
                .map(|(c, &x)| (c, weights[window[c]] / x))
                .fold((usize::MAX, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best });
            if pivot == usize::MAX {
                continue;
            }
            let mut zeroed = vec![pivot];
            for (c, &x) in v.iter().enumerate() {
                if !alive[c] || x == 0.0 {
                    continue;
                }
                let w = &mut weights[window[c]];
                *w -= t * x;
                if c != pivot && *w <= ZERO_WEIGHT_TOL {
                    zeroed.push(c);
                }
            }
            weights[window[pivot]] = 0.0;
            steps += 1;

            // keep the surviving kernel vectors free of every removed atom
            let mut kernel_pivot = Some((v, pivot));
            for &c in &zeroed {
                weights[window[c]] = 0.0;
                alive[c] = false;
                remaining -= 1;
                let basis_vec = match kernel_pivot.take() {
                    Some((v, p)) if p == c => Some(v),
                    _ => {
                        // pick the remaining vector with the largest entry at c
                        let best = kernel
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1[c].abs().total_cmp(&b.1[c].abs()))
                            .map(|(k, u)| (k, u[c]));
                        match best {
                            Some((k, val)) if val != 0.0 => Some(kernel.swap_remove(k)),
                            _ => None,
                        }
                    }
                };
                if let Some(b) = basis_vec {
                    let bc = b[c];
                    for u in kernel.iter_mut() {
                        let f = u[c] / bc;
                        if f != 0.0 {
                            u.iter_mut().zip(&b).for_each(|(x, y)| *x -= f * y);
                            u[c] = 0.0;
                        }
                    }
                }
            }
        }
        let mut c = 0;
        window.retain(|_| {
            let keep = alive[c];
            c += 1;
            keep
        });
    }
    window.extend(pending);
    window.retain(|&i| weights[i] > 0.0);
    (window, steps)
}
