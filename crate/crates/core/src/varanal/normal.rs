//! Regular and limiting normal cones of polyhedral unions, coderivative slices
//! and exact inclusion tests between unions of polyhedra.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::polyhedron::{strict_point, ConvexPolyhedron, PolyUnion};
use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome};
use crate::polycone::PolyCone;
use crate::rational::{dot, neg_vec, unwrap_mat, wrap_mat, QVec, Rat, Q};

/// A finite union of polyhedral cones in canonical form.
///
/// Canonical form: absorbed and duplicate pieces are dropped, a line one of
/// whose halves lies in another piece is replaced by its other half, and the
/// pieces are sorted by generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeUnion {
    dim: usize,
    pieces: Vec<PolyCone>,
}

impl ConeUnion {
    pub fn new(dim: usize, pieces: Vec<PolyCone>) -> Result<Self> {
        for p in &pieces {
            check_dim(dim, p.dim())?;
        }
        Ok(ConeUnion { dim, pieces: canonicalize(pieces) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[PolyCone] {
        &self.pieces
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.pieces.iter().any(|p| p.contains(v))
    }

    pub fn to_set(&self) -> Result<SetUnion> {
        let pieces = self.pieces.iter().map(ConvexPolyhedron::from_cone).collect::<Result<_>>()?;
        Ok(SetUnion { dim: self.dim, pieces })
    }

    /// Smallest angle between `v` and any piece.
    pub fn angle_to(&self, v: &[f64]) -> f64 {
        self.pieces.iter().map(|p| angle_to_cone(p, v)).fold(std::f64::consts::PI, f64::min)
    }
}

fn gen_key(c: &PolyCone) -> Vec<QVec> {
    c.generators()
}

fn drop_absorbed(mut v: Vec<PolyCone>) -> Vec<PolyCone> {
    v.sort_by_key(gen_key);
    v.dedup();
    let keep: Vec<bool> = (0..v.len()).map(|i| !(0..v.len()).any(|j| j != i && v[j].contains_cone(&v[i]))).collect();
    v.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

fn canonicalize(pieces: Vec<PolyCone>) -> Vec<PolyCone> {
    let v = drop_absorbed(pieces);
    let mut out = Vec::with_capacity(v.len());
    for (i, c) in v.iter().enumerate() {
        let halves = c.split_line();
        if halves.len() == 2 {
            let absorbed = |h: &PolyCone| v.iter().enumerate().any(|(j, o)| j != i && o.contains_cone(h));
            match (absorbed(&halves[0]), absorbed(&halves[1])) {
                (true, false) => {
                    out.push(halves[1].clone());
                    continue;
                }
                (false, true) => {
                    out.push(halves[0].clone());
                    continue;
                }
                _ => {}
            }
        }
        out.push(c.clone());
    }
    drop_absorbed(out)
}

#[derive(Serialize, Deserialize)]
struct ConeUnionJson {
    dim: usize,
    pieces: Vec<Vec<Vec<Rat>>>,
}

/// JSON form: one generator list (rational strings) per piece.
impl Serialize for ConeUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pieces = self.pieces.iter().map(|p| wrap_mat(&p.generators())).collect();
        ConeUnionJson { dim: self.dim, pieces }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConeUnion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ConeUnionJson::deserialize(d)?;
        let pieces = j
            .pieces
            .iter()
            .map(|g| PolyCone::from_generators(j.dim, &unwrap_mat(g)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        ConeUnion::new(j.dim, pieces).map_err(serde::de::Error::custom)
    }
}

/// `N_P(x̄)` for a convex polyhedron: the cone of active constraint normals.
pub fn normal_cone_convex(p: &ConvexPolyhedron, xbar: &[Q]) -> Result<PolyCone> {
    check_dim(p.dim(), xbar.len())?;
    if !p.contains(xbar) {
        return Err(Error::Infeasible("reference point is not in the polyhedron".into()));
    }
    let act: Vec<QVec> = p.active(xbar).into_iter().map(|i| p.rows()[i].clone()).collect();
    PolyCone::from_generators(p.dim(), &act)
}

fn local_pieces(u: &PolyUnion, xbar: &[Q]) -> Result<Vec<Vec<QVec>>> {
    check_dim(u.dim(), xbar.len())?;
    let local: Vec<Vec<QVec>> = u
        .pieces
        .iter()
        .filter(|p| p.contains(xbar))
        .map(|p| p.active(xbar).into_iter().map(|i| p.rows()[i].clone()).collect())
        .collect();
    if local.is_empty() {
        return Err(Error::Infeasible(format!("reference point is not in `{}`", u.label)));
    }
    Ok(local)
}

/// Regular normal cone of the union: the intersection of the pieces' normal cones.
pub fn regular_normal_cone(u: &PolyUnion, xbar: &[Q]) -> Result<PolyCone> {
    let local = local_pieces(u, xbar)?;
    let mut acc = PolyCone::whole(u.dim())?;
    for rows in &local {
        acc = acc.intersect(&PolyCone::from_generators(u.dim(), rows)?)?;
    }
    Ok(acc)
}

#[derive(Clone)]
enum Cell {
    /// Direction stays in the piece with exactly these active rows tight.
    In(Vec<usize>),
    /// Direction leaves the piece through this row.
    Out(usize),
}

/// Limiting normal cone of a finite union of convex polyhedra by the cell method.
///
/// Near `x̄` the union coincides with `x̄ + ∪ T_i`, `T_i` the tangent cones.
/// Every direction `d` has a cell: for each piece either the exact set of
/// tight active rows or a violated one. The regular normal cone at `x̄ + εd`
/// is the intersection of the normal cones of the pieces containing it, and
/// the union over all realizable cells is the limiting normal cone.
pub fn limiting_normal_cone_union(u: &PolyUnion, xbar: &[Q]) -> Result<ConeUnion> {
    let dim = u.dim();
    let local = local_pieces(u, xbar)?;
    let options: Vec<Vec<Cell>> = local
        .iter()
        .map(|rows| {
            let k = rows.len();
            let mut o: Vec<Cell> =
                (0..1usize << k).map(|mask| Cell::In((0..k).filter(|i| mask >> i & 1 == 1).collect())).collect();
            o.extend((0..k).map(Cell::Out));
            o
        })
        .collect();
    let mut found = Vec::new();
    let mut chosen = Vec::with_capacity(local.len());
    enumerate_cells(dim, &local, &options, &mut chosen, &mut found)?;
    ConeUnion::new(dim, found)
}

/// Rows `a` with right-hand side `b`.
type Rows = Vec<(QVec, Q)>;

fn cell_constraints(local: &[Vec<QVec>], chosen: &[Cell]) -> (Rows, Rows) {
    let mut eq = Vec::new();
    let mut lt = Vec::new();
    for (rows, c) in local.iter().zip(chosen) {
        match c {
            Cell::In(s) => {
                for (k, r) in rows.iter().enumerate() {
                    if s.contains(&k) {
                        eq.push((r.clone(), Q::zero()));
                    } else {
                        lt.push((r.clone(), Q::zero()));
                    }
                }
            }
            Cell::Out(k) => lt.push((neg_vec(&rows[*k]), Q::zero())),
        }
    }
    (eq, lt)
}

fn enumerate_cells(
    dim: usize,
    local: &[Vec<QVec>],
    options: &[Vec<Cell>],
    chosen: &mut Vec<Cell>,
    found: &mut Vec<PolyCone>,
) -> Result<()> {
    let i = chosen.len();
    if i == local.len() {
        let mut cone: Option<PolyCone> = None;
        for (rows, c) in local.iter().zip(chosen.iter()) {
            if let Cell::In(s) = c {
                let gens: Vec<QVec> = s.iter().map(|&k| rows[k].clone()).collect();
                let n = PolyCone::from_generators(dim, &gens)?;
                cone = Some(match cone {
                    Some(acc) => acc.intersect(&n)?,
                    None => n,
                });
            }
        }
        if let Some(c) = cone {
            found.push(c);
        }
        return Ok(());
    }
    for opt in &options[i] {
        chosen.push(opt.clone());
        let (eq, lt) = cell_constraints(&local[..=i], chosen);
        if strict_point(dim, &[], &eq, &lt)?.is_some() {
            enumerate_cells(dim, local, options, chosen, found)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// A finite union of convex polyhedra that may be empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetUnion {
    pub dim: usize,
    pub pieces: Vec<ConvexPolyhedron>,
}

impl SetUnion {
    pub fn empty(dim: usize) -> Self {
        SetUnion { dim, pieces: vec![] }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    /// `{x + shift : x ∈ self}`.
    pub fn translate(&self, shift: &[Q]) -> Result<SetUnion> {
        check_dim(self.dim, shift.len())?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let b = p.rows().iter().zip(p.rhs()).map(|(r, c)| c + dot(r, shift)).collect();
                ConvexPolyhedron::new(self.dim, p.rows().to_vec(), b)
            })
            .collect::<Result<_>>()?;
        Ok(SetUnion { dim: self.dim, pieces })
    }

    /// Union of two sets in the same space.
    pub fn union(mut self, other: SetUnion) -> Result<SetUnion> {
        check_dim(self.dim, other.dim)?;
        self.pieces.extend(other.pieces);
        Ok(self)
    }

    /// Exact set equality.
    pub fn same_set(&self, other: &SetUnion) -> Result<bool> {
        Ok(inclusion_check(self, other)?.holds && inclusion_check(other, self)?.holds)
    }

    /// On the real line: maximal disjoint intervals `(lo, hi)`, `None` meaning infinite.
    pub fn intervals(&self) -> Result<Vec<(Option<Q>, Option<Q>)>> {
        check_dim(1, self.dim)?;
        let mut iv: Vec<(Option<Q>, Option<Q>)> = self
            .pieces
            .iter()
            .map(|p| {
                let mut lo: Option<Q> = None;
                let mut hi: Option<Q> = None;
                for (r, c) in p.rows().iter().zip(p.rhs()) {
                    let a = &r[0];
                    if a.is_zero() {
                        continue;
                    }
                    let v = c / a;
                    if *a > Q::zero() {
                        hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
                    } else {
                        lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
                    }
                }
                (lo, hi)
            })
            .collect();
        iv.sort_by(|a, b| match (&a.0, &b.0) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Less,
            (_, None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(y),
        });
        let mut out: Vec<(Option<Q>, Option<Q>)> = Vec::new();
        for (lo, hi) in iv {
            if let Some(last) = out.last_mut() {
                let touches = match (&last.1, &lo) {
                    (None, _) | (_, None) => true,
                    (Some(h), Some(l)) => l <= h,
                };
                if touches {
                    last.1 = match (&last.1, &hi) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(a.max(b).clone()),
                    };
                    continue;
                }
            }
            out.push((lo, hi));
        }
        Ok(out)
    }

    /// Short text form for one-dimensional sets (`∅`, `{0}`, `[0, +inf)`, ...).
    pub fn describe(&self) -> String {
        let Ok(iv) = self.intervals() else {
            return format!("union of {} polyhedra in R^{}", self.pieces.len(), self.dim);
        };
        if iv.is_empty() {
            return "∅".into();
        }
        let f = crate::rational::fmt_q;
        iv.iter()
            .map(|(lo, hi)| match (lo, hi) {
                (Some(a), Some(b)) if a == b => format!("{{{}}}", f(a)),
                (Some(a), Some(b)) => format!("[{}, {}]", f(a), f(b)),
                (Some(a), None) => format!("[{}, +inf)", f(a)),
                (None, Some(b)) => format!("(-inf, {}]", f(b)),
                (None, None) => "R".into(),
            })
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

/// `D*F(x̄,z̄)(z*) = {x* : (x*, −z*) ∈ N}` for `N` living in `R^n × R^q`.
///
/// Each piece slices to a polyhedron; empty slices are certified by LP and dropped.
pub fn coderivative_slice(nc: &ConeUnion, n: usize, z_star: &[Q]) -> Result<SetUnion> {
    if n == 0 || n >= nc.dim() {
        return Err(Error::Invalid(format!("parameter dimension {n} incompatible with ambient {}", nc.dim())));
    }
    check_dim(nc.dim() - n, z_star.len())?;
    let mut pieces = Vec::new();
    for c in nc.pieces() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for h in c.halfspaces() {
            // h_x·x* − h_z·z* ≤ 0
            a.push(h[..n].to_vec());
            b.push(dot(&h[n..], z_star));
        }
        if let Some(p) = ConvexPolyhedron::try_new(n, a, b)? {
            pieces.push(p);
        }
    }
    let s = SetUnion { dim: n, pieces };
    simplify(s)
}

fn subset_of(p: &ConvexPolyhedron, q: &ConvexPolyhedron) -> Result<bool> {
    for (r, c) in q.rows().iter().zip(q.rhs()) {
        let lp = LinearProgram::free_le(neg_vec(r), p.rows().to_vec(), p.rhs().to_vec());
        match lp_solve(&lp)? {
            LpOutcome::Optimal(s) if -s.value.clone() <= *c => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Drops pieces contained in another piece.
pub fn simplify(s: SetUnion) -> Result<SetUnion> {
    let SetUnion { dim, pieces } = s;
    let mut keep = vec![true; pieces.len()];
    for i in 0..pieces.len() {
        for j in 0..pieces.len() {
            if i == j || !keep[j] {
                continue;
            }
            if subset_of(&pieces[i], &pieces[j])? {
                keep[i] = false;
                break;
            }
        }
    }
    let pieces = pieces.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
    Ok(SetUnion { dim, pieces })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inclusion {
    pub holds: bool,
    /// A point of the left set outside the right one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Rat>>,
}

/// Decides `a ⊆ b` exactly.
///
/// For each piece of `a`, candidate witnesses (minimal-face points and
/// points plus recession generators) are tried first; then every choice of
/// one violated row per piece of `b` is tested for a point of the piece by a
/// strict-feasibility LP.
pub fn inclusion_check(a: &SetUnion, b: &SetUnion) -> Result<Inclusion> {
    check_dim(a.dim, b.dim)?;
    for p in &a.pieces {
        if let Some(w) = piece_witness(p, b)? {
            return Ok(Inclusion { holds: false, witness: Some(w.into_iter().map(Rat).collect()) });
        }
    }
    Ok(Inclusion { holds: true, witness: None })
}

fn piece_witness(p: &ConvexPolyhedron, b: &SetUnion) -> Result<Option<QVec>> {
    if let Some(v) = p.vrep() {
        let gens = v.recession.generators();
        for x in &v.points {
            if !b.contains(x) {
                return Ok(Some(x.clone()));
            }
            for g in &gens {
                let y: QVec = x.iter().zip(g).map(|(a, c)| a + c).collect();
                if !b.contains(&y) {
                    return Ok(Some(y));
                }
            }
        }
    }
    let le: Vec<(QVec, Q)> = p.rows().iter().cloned().zip(p.rhs().iter().cloned()).collect();
    let mut choice = Vec::with_capacity(b.pieces.len());
    search_outside(p.dim(), &le, &b.pieces, &mut choice)
}

fn search_outside(
    dim: usize,
    le: &[(QVec, Q)],
    bs: &[ConvexPolyhedron],
    choice: &mut Vec<(QVec, Q)>,
) -> Result<Option<QVec>> {
    if strict_point(dim, le, &[], choice)?.is_none() {
        return Ok(None);
    }
    let i = choice.len();
    if i == bs.len() {
        return strict_point(dim, le, &[], choice);
    }
    for (r, c) in bs[i].rows().iter().zip(bs[i].rhs()) {
        // r·x > c
        choice.push((neg_vec(r), -c.clone()));
        let w = search_outside(dim, le, bs, choice)?;
        choice.pop();
        if w.is_some() {
            return Ok(w);
        }
    }
    Ok(None)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
pub(crate) fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let (top, rest) = a.split_at_mut(r);
            for (v, p) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                *v -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Euclidean projection of `v` onto a cone, by enumerating generator subsets.
pub(crate) fn project_onto_cone(c: &PolyCone, v: &[f64]) -> Vec<f64> {
    let gens: Vec<Vec<f64>> = c.generators().iter().map(|g| crate::rational::vec_to_f64(g)).collect();
    let d = v.len();
    let mut best = vec![0.0; d];
    let mut best_dist = norm(v);
    for k in 1..=d.min(gens.len()) {
        for s in crate::polycone::combinations(gens.len(), k) {
            let gram: Vec<Vec<f64>> =
                s.iter().map(|&i| s.iter().map(|&j| dot_f(&gens[i], &gens[j])).collect()).collect();
            let rhs: Vec<f64> = s.iter().map(|&i| dot_f(&gens[i], v)).collect();
            let Some(coef) = solve_f64(gram, rhs) else {
                continue;
            };
            if coef.iter().any(|&c| c < -1e-12) {
                continue;
            }
            let mut p = vec![0.0; d];
            for (&i, cf) in s.iter().zip(&coef) {
                for (pk, gk) in p.iter_mut().zip(&gens[i]) {
                    *pk += cf * gk;
                }
            }
            let dist = norm(&v.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>());
            if dist < best_dist {
                best_dist = dist;
                best = p;
            }
        }
    }
    best
}

pub(crate) fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Angle between `v` and its projection onto the cone (`π/2` when the projection is zero).
pub fn angle_to_cone(c: &PolyCone, v: &[f64]) -> f64 {
    let p = project_onto_cone(c, v);
    let pn = norm(&p);
    let r: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
    if pn == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    norm(&r).atan2(pn)
}
