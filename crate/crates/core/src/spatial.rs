//! Uniform-cell spatial hash for fixed-radius neighbor queries.

use std::collections::HashMap;

/// Cells are keyed on the first `KEY_DIMS` coordinates; distances use all of them.
const KEY_DIMS: usize = 4;

type Key = [i64; KEY_DIMS];

pub(crate) struct SpatialHash<'a> {
    data: &'a [f64],
    dim: usize,
    cell: f64,
    map: HashMap<Key, Vec<u32>>,
}

impl<'a> SpatialHash<'a> {
    /// Indexes the rows of a row-major buffer; queries must use radius ≤ `cell`.
    pub fn new(data: &'a [f64], dim: usize, cell: f64) -> Self {
        let cell = if cell > 0.0 { cell } else { f64::MIN_POSITIVE };
        let mut map: HashMap<Key, Vec<u32>> = HashMap::new();
        for (i, p) in data.chunks_exact(dim).enumerate() {
            map.entry(key(p, cell)).or_default().push(i as u32);
        }
        SpatialHash { data, dim, cell, map }
    }

    fn row(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Calls `f(index, distance)` for every row within `r` of `p`; stops when `f` returns true.
    pub fn visit_within(&self, p: &[f64], r: f64, mut f: impl FnMut(usize, f64) -> bool) -> bool {
        debug_assert!(r <= self.cell * (1.0 + 1e-12));
        let base = key(p, self.cell);
        let kd = self.dim.min(KEY_DIMS);
        let total = 3usize.pow(kd as u32);
        for code in 0..total {
            let mut k = base;
            let mut c = code;
            for slot in k.iter_mut().take(kd) {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(ids) = self.map.get(&k) {
                for &i in ids {
                    let d = dist(self.row(i), p);
                    if d <= r && f(i as usize, d) {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn any_within(&self, p: &[f64], r: f64) -> bool {
        self.visit_within(p, r, |_, _| true)
    }

    #[cfg(test)]
    pub fn within(&self, p: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_within(p, r, |i, _| {
            out.push(i);
            false
        });
        out.sort_unstable();
        out
    }
}

fn key(p: &[f64], cell: f64) -> Key {
    let mut k = [0i64; KEY_DIMS];
    for (slot, v) in k.iter_mut().zip(p) {
        *slot = (v / cell).floor().clamp(-1e15, 1e15) as i64;
    }
    k
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}
