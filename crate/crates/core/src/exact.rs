//! Textbook column reduction over GF(2).
//!
//! This is the ground truth every approximate run is measured against.

use crate::matrix::BinaryMatrix;

/// Index of the lowest one in `v`, extended so the zero vector maps to `n - 1`.
pub fn low_exact(v: &[bool]) -> usize {
    pivot(v).unwrap_or(v.len().saturating_sub(1))
}

/// Lowest one of a nonzero column, `None` for the zero column.
pub fn pivot(v: &[bool]) -> Option<usize> {
    v.iter().rposition(|&e| e)
}

/// Reduces `delta` by left-to-right column additions.
///
/// Column `j` absorbs the earlier column sharing its lowest one until no such
/// column exists. Lows of the already-reduced prefix are distinct, so at most
/// one candidate exists at every step.
pub fn reduce_exact(delta: &BinaryMatrix) -> BinaryMatrix {
    let n = delta.n();
    let mut r = delta.clone();
    // owner[i] = reduced column whose lowest one sits in row i
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(low) = pivot(r.column(j)) {
            match owner[low] {
                Some(j0) => {
                    let src = r.column(j0).to_vec();
                    for (e, s) in r.column_mut(j).iter_mut().zip(src) {
                        *e ^= s;
                    }
                }
                None => {
                    owner[low] = Some(j);
                    break;
                }
            }
        }
    }
    r
}

/// Whether all nonzero columns have pairwise distinct lowest ones.
pub fn is_reduced(r: &BinaryMatrix) -> bool {
    duplicate_low(r).is_none()
}

/// First pair of columns `(a, b, low)` with `a < b` sharing a lowest one.
pub fn duplicate_low(r: &BinaryMatrix) -> Option<(usize, usize, usize)> {
    let mut owner: Vec<Option<usize>> = vec![None; r.n()];
    for j in 0..r.n() {
        if let Some(low) = pivot(r.column(j)) {
            if let Some(first) = owner[low] {
                return Some((first, j, low));
            }
            owner[low] = Some(j);
        }
    }
    None
}

/// The `(low, column)` pairs of a reduced matrix, in column order.
pub fn pairs(r: &BinaryMatrix) -> Vec<(usize, usize)> {
    (0..r.n())
        .filter_map(|j| pivot(r.column(j)).map(|low| (low, j)))
        .collect()
}
