//! Exact Gaussian elimination on small rational matrices.

use num_traits::{One, Zero};

use crate::rational::{primitive, QVec, Q};

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..m[r].len() {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{v : rows·v = 0}`, each vector primitive.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            primitive(&v)
        })
        .collect()
}

/// Solves a square system; `None` when singular.
pub fn solve(a: &[QVec], b: &[Q]) -> Option<QVec> {
    let n = a.len();
    let aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}
