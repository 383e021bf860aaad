//! Exact polyhedral cones in dimension ≤ 4 with canonical V-representation.
//!
//! A cone is stored as halfspaces `h·v ≤ 0` together with its lineality space
//! (RREF basis) and the extreme rays of its pointed part inside the orthogonal
//! complement of the lineality space. Rays and basis rows are primitive integer
//! vectors, so two cones are equal iff their V-representations are.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{nullspace, rank, rref};
use crate::rational::{dot, is_zero_vec, neg_vec, primitive, unwrap_mat, wrap_mat, QVec, Rat, Q};

pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct PolyCone {
    dim: usize,
    halfspaces: Vec<QVec>,
    lineality: Vec<QVec>,
    rays: Vec<QVec>,
}

impl PartialEq for PolyCone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.lineality == other.lineality && self.rays == other.rays
    }
}

impl Eq for PolyCone {}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn vrep(dim: usize, h: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let lin_raw = nullspace(h, dim);
    let lineality: Vec<QVec> = rref(&lin_raw, dim).0.iter().map(|r| primitive(r)).collect();
    let l = lineality.len();
    if l == dim {
        return (lineality, vec![]);
    }
    let k = dim - l - 1;
    let rows: Vec<&QVec> = h.iter().filter(|r| !is_zero_vec(r)).collect();
    let mut rays: Vec<QVec> = Vec::new();
    for subset in combinations(rows.len(), k) {
        let mut m: Vec<QVec> = subset.iter().map(|&i| rows[i].clone()).collect();
        m.extend(lineality.iter().cloned());
        let ns = nullspace(&m, dim);
        if ns.len() != 1 {
            continue;
        }
        for cand in [ns[0].clone(), neg_vec(&ns[0])] {
            if rows.iter().all(|r| !dot(r, &cand).is_positive()) {
                let p = primitive(&cand);
                if !rays.contains(&p) {
                    rays.push(p);
                }
            }
        }
    }
    rays.sort();
    (lineality, rays)
}

impl PolyCone {
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<QVec>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Invalid(format!("polyhedral cones supported in dimension 1..={MAX_DIM}, got {dim}")));
        }
        for h in &halfspaces {
            check_dim(dim, h.len())?;
        }
        let (lineality, rays) = vrep(dim, &halfspaces);
        Ok(PolyCone { dim, halfspaces, lineality, rays })
    }

    /// The cone of nonnegative combinations of `gens` (the zero cone when empty).
    pub fn from_generators(dim: usize, gens: &[QVec]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Invalid(format!("polyhedral cones supported in dimension 1..={MAX_DIM}, got {dim}")));
        }
        for g in gens {
            check_dim(dim, g.len())?;
        }
        let (plin, prays) = vrep(dim, gens);
        let mut h: Vec<QVec> = prays;
        for l in plin {
            h.push(neg_vec(&l));
            h.push(l);
        }
        Self::from_halfspaces(dim, h)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_generators(dim, &[])
    }

    pub fn whole(dim: usize) -> Result<Self> {
        Self::from_halfspaces(dim, vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[QVec] {
        &self.halfspaces
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    /// Rays followed by ± each lineality basis vector.
    pub fn generators(&self) -> Vec<QVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(neg_vec(l));
        }
        g
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    /// Dimension of the linear span.
    pub fn span_dim(&self) -> usize {
        rank(&self.generators(), self.dim)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        v.len() == self.dim && self.halfspaces.iter().all(|h| !dot(h, v).is_positive())
    }

    pub fn contains_cone(&self, other: &PolyCone) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    pub fn intersect(&self, other: &PolyCone) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut h = self.halfspaces.clone();
        h.extend(other.halfspaces.iter().cloned());
        Self::from_halfspaces(self.dim, h)
    }

    /// `{u : ⟨u, v⟩ ≤ 0 for all v in the cone}`.
    pub fn polar(&self) -> Result<Self> {
        Self::from_generators(self.dim, &self.halfspaces)
    }

    /// `{u : ⟨u, v⟩ ≥ 0 for all v in the cone}`.
    pub fn dual(&self) -> Result<Self> {
        let neg: Vec<QVec> = self.halfspaces.iter().map(|h| neg_vec(h)).collect();
        Self::from_generators(self.dim, &neg)
    }

    /// Splits into pointed pieces: a 1-dimensional line becomes its two rays.
    pub fn split_line(&self) -> Vec<PolyCone> {
        if self.rays.is_empty() && self.lineality.len() == 1 {
            let l = &self.lineality[0];
            [l.clone(), neg_vec(l)]
                .into_iter()
                .map(|g| PolyCone::from_generators(self.dim, &[g]).expect("valid dimension"))
                .collect()
        } else {
            vec![self.clone()]
        }
    }
}

/// JSON form: the generator list (rays, then ± lineality vectors) as rational strings.
impl Serialize for PolyCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J {
            dim: usize,
            generators: Vec<Vec<Rat>>,
        }
        J { dim: self.dim, generators: wrap_mat(&self.generators()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyCone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct J {
            dim: usize,
            generators: Vec<Vec<Rat>>,
        }
        let j = J::deserialize(d)?;
        PolyCone::from_generators(j.dim, &unwrap_mat(&j.generators)).map_err(serde::de::Error::custom)
    }
}
