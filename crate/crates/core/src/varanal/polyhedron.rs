//! Exact convex polyhedra `{x : A x ≤ b}` and finite unions of them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{rank, solve};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Sense};
use crate::polycone::{combinations, PolyCone, MAX_DIM};
use crate::rational::{dot, neg_vec, unwrap_mat, unwrap_vec, wrap_mat, wrap_vec, QVec, Rat, Q};

/// Largest dimension for which the vertex/ray representation is cached.
pub const VREP_MAX_DIM: usize = 3;

/// Minimal-face points plus the recession cone.
#[derive(Clone, Debug, PartialEq)]
pub struct VRep {
    pub points: Vec<QVec>,
    pub recession: PolyCone,
}

#[derive(Clone, Debug)]
pub struct ConvexPolyhedron {
    dim: usize,
    a: Vec<QVec>,
    b: QVec,
    vrep: Option<VRep>,
}

impl PartialEq for ConvexPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.a == other.a && self.b == other.b
    }
}

/// Constraint builder: `row · x (≤|≥|=) rhs`.
pub fn constraint(row: &[i64], sense: Sense, rhs: i64) -> (QVec, Sense, Q) {
    (row.iter().map(|&v| Q::from_integer(v.into())).collect(), sense, Q::from_integer(rhs.into()))
}

/// Whether `{x : le·x ≤ ·, eq·x = ·, lt·x < ·}` is nonempty; returns a point if so.
///
/// Strict rows get a common slack `t ≤ 1` that is maximized.
pub(crate) fn strict_point(dim: usize, le: &[(QVec, Q)], eq: &[(QVec, Q)], lt: &[(QVec, Q)]) -> Result<Option<QVec>> {
    let mut obj = vec![Q::zero(); dim + 1];
    obj[dim] = -Q::one();
    let mut lp = LinearProgram::free_le(obj, vec![], vec![]);
    let ext = |r: &QVec, t: Q| {
        let mut v = r.clone();
        v.push(t);
        v
    };
    for (r, c) in le {
        lp.push_row(ext(r, Q::zero()), Sense::Le, c.clone());
    }
    for (r, c) in eq {
        lp.push_row(ext(r, Q::zero()), Sense::Eq, c.clone());
    }
    for (r, c) in lt {
        lp.push_row(ext(r, Q::one()), Sense::Le, c.clone());
    }
    let mut cap = vec![Q::zero(); dim + 1];
    cap[dim] = Q::one();
    lp.push_row(cap, Sense::Le, Q::one());
    match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => {
            let ok = lt.is_empty() || s.x[dim].is_positive();
            Ok(ok.then(|| s.x[..dim].to_vec()))
        }
        _ => Ok(None),
    }
}

impl ConvexPolyhedron {
    /// Builds `{x : a x ≤ b}`; errors when the set is empty.
    pub fn new(dim: usize, a: Vec<QVec>, b: QVec) -> Result<Self> {
        Self::try_new(dim, a, b)?.ok_or_else(|| Error::Invalid("empty polyhedron".into()))
    }

    /// Like [`ConvexPolyhedron::new`] but returns `None` for an empty set.
    pub fn try_new(dim: usize, a: Vec<QVec>, b: QVec) -> Result<Option<Self>> {
        if dim == 0 {
            return Err(Error::Invalid("zero-dimensional polyhedron".into()));
        }
        check_dim(a.len(), b.len())?;
        for r in &a {
            check_dim(dim, r.len())?;
        }
        let rows: Vec<(QVec, Q)> = a.iter().cloned().zip(b.iter().cloned()).collect();
        if strict_point(dim, &rows, &[], &[])?.is_none() {
            return Ok(None);
        }
        let mut p = ConvexPolyhedron { dim, a, b, vrep: None };
        if dim <= VREP_MAX_DIM {
            p.vrep = Some(p.compute_vrep()?);
        }
        Ok(Some(p))
    }

    /// Builds from mixed `≤ / ≥ / =` constraints.
    pub fn from_constraints(dim: usize, cons: &[(QVec, Sense, Q)]) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (r, s, c) in cons {
            match s {
                Sense::Le => {
                    a.push(r.clone());
                    b.push(c.clone());
                }
                Sense::Ge => {
                    a.push(neg_vec(r));
                    b.push(-c.clone());
                }
                Sense::Eq => {
                    a.push(r.clone());
                    b.push(c.clone());
                    a.push(neg_vec(r));
                    b.push(-c.clone());
                }
            }
        }
        Self::new(dim, a, b)
    }

    pub fn from_cone(c: &PolyCone) -> Result<Self> {
        let a = c.halfspaces().to_vec();
        let b = vec![Q::zero(); a.len()];
        Self::new(c.dim(), a, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[QVec] {
        &self.a
    }

    pub fn rhs(&self) -> &[Q] {
        &self.b
    }

    pub fn vrep(&self) -> Option<&VRep> {
        self.vrep.as_ref()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.len() == self.dim && self.a.iter().zip(&self.b).all(|(r, c)| dot(r, x) <= *c)
    }

    /// Indices of the constraints tight at `x`.
    pub fn active(&self, x: &[Q]) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| dot(&self.a[i], x) == self.b[i]).collect()
    }

    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.a.iter().zip(&self.b).all(|(r, c)| {
            let lhs: f64 = r.iter().zip(x).map(|(ri, xi)| crate::rational::to_f64(ri) * xi).sum();
            lhs <= crate::rational::to_f64(c) + tol
        })
    }

    fn compute_vrep(&self) -> Result<VRep> {
        let recession = PolyCone::from_halfspaces(self.dim, self.a.clone())?;
        let lin = recession.lineality().to_vec();
        let k = self.dim - lin.len();
        let mut points: Vec<QVec> = Vec::new();
        for subset in combinations(self.a.len(), k) {
            let mut m: Vec<QVec> = subset.iter().map(|&i| self.a[i].clone()).collect();
            let mut rhs: QVec = subset.iter().map(|&i| self.b[i].clone()).collect();
            m.extend(lin.iter().cloned());
            rhs.extend(std::iter::repeat_n(Q::zero(), lin.len()));
            if rank(&m, self.dim) < self.dim {
                continue;
            }
            if let Some(x) = solve(&m, &rhs) {
                if self.contains(&x) && !points.contains(&x) {
                    points.push(x);
                }
            }
        }
        points.sort();
        if points.is_empty() {
            return Err(Error::Invalid("nonempty polyhedron without minimal-face points".into()));
        }
        // each point must be a minimal face: dim - lineality independent tight rows
        for p in &points {
            let tight: Vec<QVec> = self.active(p).into_iter().map(|i| self.a[i].clone()).collect();
            if rank(&tight, self.dim) != k {
                return Err(Error::Invalid("vertex cross-check failed".into()));
            }
        }
        Ok(VRep { points, recession })
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
}

impl Serialize for ConvexPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson { dim: self.dim, a: wrap_mat(&self.a), b: wrap_vec(&self.b) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        ConvexPolyhedron::new(j.dim, unwrap_mat(&j.a), unwrap_vec(&j.b)).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyUnion {
    pub label: String,
    pub pieces: Vec<ConvexPolyhedron>,
}

impl PolyUnion {
    pub fn new(label: impl Into<String>, pieces: Vec<ConvexPolyhedron>) -> Result<Self> {
        let first = pieces.first().ok_or(Error::EmptyInput("polyhedral union"))?;
        let dim = first.dim();
        if dim > MAX_DIM {
            return Err(Error::Invalid(format!("ambient dimension {dim} exceeds {MAX_DIM}")));
        }
        for p in &pieces {
            check_dim(dim, p.dim())?;
        }
        Ok(PolyUnion { label: label.into(), pieces })
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }
}
