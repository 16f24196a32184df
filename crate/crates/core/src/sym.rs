//! Packed storage for symmetric matrices.
//!
//! A `p x p` symmetric matrix is stored as the `p(p+1)/2` upper-triangular
//! entries in row-major order, with off-diagonal entries scaled by `sqrt(2)`.
//! Under this map the flat Euclidean inner product equals `trace(A B)`, so
//! every vector-space routine in the crate works on matrices unchanged.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Asymmetry allowed by [`pack_sym`], relative to the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Length of the packed vector for a `p x p` matrix.
pub fn packed_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// Recover `p` from a packed length, if it is a triangular number.
pub fn order_from_packed_len(n: usize) -> Option<usize> {
    let p = ((((8 * n + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (packed_len(p) == n).then_some(p)
}

/// Position of entry `(i, j)`, `i <= j`, in the packed vector.
#[inline]
pub fn packed_index(p: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < p);
    i * p - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Packed positions of the diagonal entries.
pub fn diagonal_indices(p: usize) -> impl Iterator<Item = usize> {
    (0..p).map(move |i| packed_index(p, i, i))
}

pub fn pack_sym(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    let p = a.nrows();
    if a.ncols() != p {
        return Err(Error::InvalidInput(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.amax().max(1.0);
    for i in 0..p {
        for j in (i + 1)..p {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(pack_sym_unchecked(a))
}

/// Packs the upper triangle without checking symmetry.
pub(crate) fn pack_sym_unchecked(a: &DMatrix<f64>) -> DVector<f64> {
    let p = a.nrows();
    let mut v = DVector::zeros(packed_len(p));
    let mut k = 0;
    for i in 0..p {
        v[k] = a[(i, i)];
        k += 1;
        for j in (i + 1)..p {
            v[k] = SQRT_2 * a[(i, j)];
            k += 1;
        }
    }
    v
}

pub fn unpack_sym(v: &DVector<f64>, p: usize) -> Result<DMatrix<f64>> {
    crate::error::check_dim(packed_len(p), v.len())?;
    Ok(unpack_sym_unchecked(v.as_slice(), p))
}

pub(crate) fn unpack_sym_unchecked(v: &[f64], p: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(p, p);
    let mut k = 0;
    for i in 0..p {
        a[(i, i)] = v[k];
        k += 1;
        for j in (i + 1)..p {
            let x = v[k] / SQRT_2;
            a[(i, j)] = x;
            a[(j, i)] = x;
            k += 1;
        }
    }
    a
}

/// `(row, col)` pairs of the packed coordinates, in packed order.
pub(crate) fn packed_pairs(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(packed_len(p));
    for i in 0..p {
        for j in i..p {
            out.push((i, j));
        }
    }
    out
}
