#![allow(dead_code)]

pub mod theorems;

use hetda::matrix::BinaryMatrix;
use hetda::simplicial::{Filtration, Simplex};
use proptest::prelude::*;

/// Every strictly upper triangular `n × n` binary matrix, in bit order.
pub fn all_upper(n: usize) -> impl Iterator<Item = BinaryMatrix> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    (0u64..1 << slots.len()).map(move |bits| {
        let mut m = BinaryMatrix::zeros(n);
        for (k, &(i, j)) in slots.iter().enumerate() {
            m.set(i, j, bits >> k & 1 == 1);
        }
        m
    })
}

/// Rank over GF(2) of the submatrix with rows `rows` and columns `0..=last`.
pub fn rank(m: &BinaryMatrix, rows: std::ops::Range<usize>, last: Option<usize>) -> usize {
    let Some(last) = last else { return 0 };
    let mut vecs: Vec<u128> = (0..=last)
        .map(|j| {
            rows.clone()
                .filter(|&i| m.get(i, j))
                .fold(0u128, |acc, i| acc | 1 << i)
        })
        .collect();
    let mut r = 0;
    for bit in rows.clone() {
        if let Some(p) = (r..vecs.len()).find(|&k| vecs[k] >> bit & 1 == 1) {
            vecs.swap(r, p);
            let pv = vecs[r];
            for (k, v) in vecs.iter_mut().enumerate() {
                if k != r && *v >> bit & 1 == 1 {
                    *v ^= pv;
                }
            }
            r += 1;
        }
    }
    r
}

/// `(low, column)` pairs from ranks alone: row `i` pairs with column `j` iff
/// `r(i, j) - r(i+1, j) - r(i, j-1) + r(i+1, j-1) = 1`, where `r(i, j)` is
/// the rank of rows `i..` and columns `..=j`.
pub fn pairs_by_rank(m: &BinaryMatrix) -> Vec<(usize, usize)> {
    let n = m.n();
    let r = |i: usize, j: Option<usize>| rank(m, i..n, j) as i64;
    let mut out = Vec::new();
    for j in 0..n {
        let prev = j.checked_sub(1);
        for i in 0..n {
            if r(i, Some(j)) - r(i + 1, Some(j)) - r(i, prev) + r(i + 1, prev) == 1 {
                out.push((i, j));
            }
        }
    }
    out
}

/// A random simplicial complex on up to `max_vertices` vertices, closed under
/// faces, ordered by dimension with shuffled ties and nondecreasing scales.
pub fn filtration(max_vertices: u32, max_dim: usize) -> impl Strategy<Value = Filtration> {
    (2..=max_vertices)
        .prop_flat_map(move |nv| {
            let candidates: Vec<Vec<u32>> = (1u32..1 << nv)
                .map(|mask| (0..nv).filter(|v| mask >> v & 1 == 1).collect::<Vec<_>>())
                .filter(|s: &Vec<u32>| s.len() <= max_dim + 1)
                .collect();
            let k = candidates.len();
            (
                Just(candidates),
                proptest::collection::vec(any::<bool>(), k),
                proptest::collection::vec(0u32..1000, k),
                proptest::collection::vec(0u8..3, k),
            )
        })
        .prop_map(|(candidates, keep, keys, steps)| {
            let mut chosen: Vec<(usize, u32, Vec<u32>)> = Vec::new();
            for (idx, s) in candidates.iter().enumerate() {
                // A simplex enters only if it was drawn (vertices always are)
                // and every facet is already present.
                let facets_present = s.len() == 1
                    || (0..s.len()).all(|skip| {
                        let face: Vec<u32> = s
                            .iter()
                            .enumerate()
                            .filter(|&(p, _)| p != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        chosen.iter().any(|c| c.2 == face)
                    });
                if (s.len() == 1 || keep[idx]) && facets_present {
                    chosen.push((s.len(), keys[idx], s.clone()));
                }
            }
            chosen.sort_by_key(|c| (c.0, c.1));
            let mut simplices = vec![Simplex::empty()];
            let mut scales = vec![0.0];
            let mut scale = 0.0;
            for (idx, (_, _, s)) in chosen.into_iter().enumerate() {
                scale += f64::from(steps[idx % steps.len()]);
                simplices.push(Simplex::new(s).unwrap());
                scales.push(scale);
            }
            Filtration::new(simplices, scales)
        })
}
