//! Weighted-sum scalarization `min ⟨λ, f(x,y)⟩` over grids, the union
//! characterization of weak efficiency, Ξ samples, and the hybrid LP test for
//! linear problems.

use serde::Serialize;

use crate::cones::{OrderingCone, SphereNorm};
use crate::error::{check_dim, Error, Result};
use crate::mappings::evaluate;
use crate::parametric::{GridSpec, ParametricMop, Points};
use crate::rational::{dot, from_f64, q, QVec, Q};

pub use crate::lp::{feasible_le, lp_solve, LinearProgram, LpOutcome, LpSolution, Sense, VarKind};

/// Absolute slack when comparing scalarized values.
pub const VALUE_TOL: f64 = 1e-12;
/// Default relative tolerance for Ξ samples.
pub const XI_TOL: f64 = 1e-9;

/// `min ⟨λ, f(x,y)⟩` over Γ(x) for a validated weight `λ ∈ C* ∩ S₁(0)`.
#[derive(Clone, Debug)]
pub struct ScalarizedProblem<'a> {
    pub problem: &'a ParametricMop,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl<'a> ScalarizedProblem<'a> {
    pub fn new(problem: &'a ParametricMop, x: &[f64], lambda: &[f64], norm: SphereNorm) -> Result<Self> {
        problem.check_x(x)?;
        check_dim(problem.q, lambda.len())?;
        if !problem.cone.dual_contains(lambda, 1e-12) {
            return Err(Error::Invalid(format!("weight {lambda:?} is not in the dual cone")));
        }
        if (norm.norm(lambda) - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("weight {lambda:?} is not a unit vector")));
        }
        Ok(ScalarizedProblem { problem, x: x.to_vec(), lambda: lambda.to_vec() })
    }

    pub fn solve(&self, grid: &GridSpec) -> Result<ScalarizedSolution> {
        let ev = evaluate(self.problem, &self.x, grid, &[])?;
        if ev.ys.is_empty() {
            return Err(Error::EmptyInput("feasible grid"));
        }
        let vals = weighted(&ev.zs, self.problem.q, &self.lambda);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let mut decisions = Points::new(self.problem.m);
        for (i, v) in vals.iter().enumerate() {
            if *v <= min + VALUE_TOL {
                decisions.push(ev.ys.get(i));
            }
        }
        Ok(ScalarizedSolution { lambda: self.lambda.clone(), value: min, decisions })
    }
}

#[derive(Clone, Debug)]
pub struct ScalarizedSolution {
    pub lambda: Vec<f64>,
    pub value: f64,
    pub decisions: Points,
}

fn weighted(zs: &[f64], q: usize, lambda: &[f64]) -> Vec<f64> {
    zs.chunks_exact(q).map(|z| z.iter().zip(lambda).map(|(a, b)| a * b).sum()).collect()
}

/// Argmin set of `⟨λ, f(x,·)⟩` over the feasible grid (Euclidean unit weights).
pub fn scalarized_solve(
    problem: &ParametricMop,
    x: &[f64],
    lambda: &[f64],
    grid: &GridSpec,
) -> Result<ScalarizedSolution> {
    ScalarizedProblem::new(problem, x, lambda, SphereNorm::Euclidean)?.solve(grid)
}

/// Whether the union equals Ψw(x) (convex problems) or only bounds it from inside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reach {
    Equivalent,
    ScalarizationReachableSubset,
}

#[derive(Clone, Debug)]
pub struct ScalarizationUnion {
    pub decisions: Points,
    /// Weights swept: the dual-sphere grid followed by critical weights.
    pub weights: Vec<Vec<f64>>,
    pub critical_weights: usize,
    pub reach: Reach,
    pub warning: Option<String>,
}

/// Inward unit normals of the convex-hull edges of a planar image set that
/// lie in the dual cone: the weights at which the scalarized argmin jumps.
pub fn critical_weights(zs: &[f64], cone: &OrderingCone) -> Vec<Vec<f64>> {
    if cone.dim() != 2 || zs.len() < 4 {
        return vec![];
    }
    let mut pts: Vec<[f64; 2]> = zs.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let hull = convex_hull(&pts);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if len == 0.0 {
            continue;
        }
        for n in [[-d[1] / len, d[0] / len], [d[1] / len, -d[0] / len]] {
            let base = n[0] * a[0] + n[1] * a[1];
            let scale = 1e-9 * (1.0 + base.abs());
            let inward = hull.iter().all(|p| n[0] * p[0] + n[1] * p[1] >= base - scale);
            if inward
                && cone.dual_contains(&n, 1e-12)
                && !out.iter().any(|w| (w[0] - n[0]).abs() + (w[1] - n[1]).abs() < 1e-12)
            {
                out.push(n.to_vec());
            }
        }
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    out
}

/// Andrew's monotone chain on lexicographically sorted, deduplicated points.
fn convex_hull(p: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if p.len() <= 2 {
        return p.to_vec();
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &pt in p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 0.0 {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &pt in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 0.0 {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Union of scalarized argmin sets over the dual-sphere grid and, for `q = 2`,
/// the critical hull-edge weights.
pub fn weak_efficiency_via_scalarization(
    problem: &ParametricMop,
    x: &[f64],
    resolution: usize,
    grid: &GridSpec,
) -> Result<ScalarizationUnion> {
    let ev = evaluate(problem, x, grid, &[])?;
    if ev.ys.is_empty() {
        return Err(Error::EmptyInput("feasible grid"));
    }
    let mut weights = problem.cone.dual_sphere_grid(resolution, SphereNorm::Euclidean)?;
    let crit = critical_weights(&ev.zs, &problem.cone);
    let critical = crit.len();
    weights.extend(crit);
    let mut hit = vec![false; ev.ys.len()];
    for w in &weights {
        let vals = weighted(&ev.zs, problem.q, w);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        for (h, v) in hit.iter_mut().zip(&vals) {
            *h |= *v <= min + VALUE_TOL;
        }
    }
    let mut decisions = Points::new(problem.m);
    for (i, h) in hit.iter().enumerate() {
        if *h {
            decisions.push(ev.ys.get(i));
        }
    }
    let (reach, warning) = if problem.convex {
        (Reach::Equivalent, None)
    } else {
        (
            Reach::ScalarizationReachableSubset,
            Some("problem is not flagged convex: the union is only a subset of the weakly efficient set".into()),
        )
    };
    Ok(ScalarizationUnion { decisions, weights, critical_weights: critical, reach, warning })
}

/// Grid weights `λ` for which `y` is a (`tol`-relative) scalarized minimizer.
pub fn xi_sample(
    problem: &ParametricMop,
    x: &[f64],
    y: &[f64],
    resolution: usize,
    grid: &GridSpec,
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    problem.check_x(x)?;
    problem.check_y(x, y)?;
    let ev = evaluate(problem, x, grid, &[y.to_vec()])?;
    let fy = problem.objective(x, y);
    let mut out = Vec::new();
    for w in problem.cone.dual_sphere_grid(resolution, SphereNorm::Euclidean)? {
        let vals = weighted(&ev.zs, problem.q, &w);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let v: f64 = fy.iter().zip(&w).map(|(a, b)| a * b).sum();
        if v <= min + tol * min.abs().max(1.0) {
            out.push(w);
        }
    }
    Ok(out)
}

/// Outcome of the hybrid scalarization LP `min eᵀD y' s.t. Ax + By' ≤ d, Dy' ≤ Dy`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearEfficiency {
    pub efficient: bool,
    /// `eᵀDy` at the tested point.
    pub target: String,
    /// LP optimum, or `None` when unbounded.
    pub optimum: Option<String>,
}

fn mat_vec(m: &[QVec], v: &[Q]) -> QVec {
    m.iter().map(|r| dot(r, v)).collect()
}

/// Exact efficiency test for `f(x,y) = Dy` over `{y : Ax + By ≤ d}` w.r.t. the orthant.
pub fn linear_efficiency_report(
    d_mat: &[QVec],
    a: &[QVec],
    b: &[QVec],
    d: &[Q],
    x: &[Q],
    y: &[Q],
) -> Result<LinearEfficiency> {
    check_dim(a.len(), b.len())?;
    check_dim(a.len(), d.len())?;
    let m = y.len();
    for (ra, rb) in a.iter().zip(b) {
        check_dim(x.len(), ra.len())?;
        check_dim(m, rb.len())?;
    }
    for r in d_mat {
        check_dim(m, r.len())?;
    }
    let ax = mat_vec(a, x);
    let rhs: QVec = d.iter().zip(&ax).map(|(di, ai)| di - ai).collect();
    if mat_vec(b, y).iter().zip(&rhs).any(|(l, r)| l > r) {
        return Err(Error::Infeasible("y is not in {y : Ax + By ≤ d}".into()));
    }
    let mut obj = vec![q(0); m];
    for r in d_mat {
        for (o, v) in obj.iter_mut().zip(r) {
            *o += v;
        }
    }
    let target = dot(&obj, y);
    let mut lp = LinearProgram::free_le(obj, b.to_vec(), rhs);
    for (r, v) in d_mat.iter().zip(mat_vec(d_mat, y)) {
        lp.push_row(r.clone(), Sense::Le, v);
    }
    Ok(match lp_solve(&lp)? {
        LpOutcome::Optimal(sol) => LinearEfficiency {
            efficient: sol.value == target,
            target: crate::rational::fmt_q(&target),
            optimum: Some(crate::rational::fmt_q(&sol.value)),
        },
        LpOutcome::Unbounded => {
            LinearEfficiency { efficient: false, target: crate::rational::fmt_q(&target), optimum: None }
        }
        LpOutcome::Infeasible => return Err(Error::Infeasible("hybrid LP infeasible at a feasible point".into())),
    })
}

pub fn linear_efficiency_test(d_mat: &[QVec], a: &[QVec], b: &[QVec], d: &[Q], x: &[Q], y: &[Q]) -> Result<bool> {
    Ok(linear_efficiency_report(d_mat, a, b, d, x, y)?.efficient)
}

/// [`linear_efficiency_test`] for a linear catalog problem, with the ordering
/// cone folded into the objective (`D ↦ GD`, `G` the dual generators).
pub fn linear_efficient(problem: &ParametricMop, x: &[f64], y: &[f64]) -> Result<bool> {
    let lin =
        problem.linear.as_ref().ok_or_else(|| Error::Invalid(format!("{} is not a linear problem", problem.name)))?;
    let g = problem.cone.dual_generators();
    let gd: Vec<QVec> = g
        .iter()
        .map(|gi| (0..problem.m).map(|j| gi.iter().zip(&lin.d_mat).fold(q(0), |acc, (a, r)| acc + a * &r[j])).collect())
        .collect();
    let xq = x.iter().map(|v| from_f64(*v)).collect::<Result<QVec>>()?;
    let yq = y.iter().map(|v| from_f64(*v)).collect::<Result<QVec>>()?;
    linear_efficiency_test(&gd, &lin.poly.a, &lin.poly.b, &lin.poly.d, &xq, &yq)
}
