//! Lower-level problem data `min_C { f(x,y) : y ∈ Γ(x) }`.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, Points};
use crate::cones::OrderingCone;
use crate::error::{check_dim, Error, Result};
use crate::expr::Expr;
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Sense};
use crate::rational::{q, vec_to_f64, QVec};

/// Absolute slack used when testing closed constraints in floating point.
pub const FEAS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::Invalid("box lower bound exceeds upper bound".into()));
        }
        Ok(BoxRegion { lower, upper })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BoxRegion { lower: vec![lo; dim], upper: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.dim()
            && p.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    pub fn on_boundary(&self, p: &[f64], tol: f64) -> bool {
        p.iter().zip(self.lower.iter().zip(&self.upper)).any(|(v, (l, u))| (v - l).abs() <= tol || (u - v).abs() <= tol)
    }

    pub fn grid(&self, step: f64) -> Result<GridSpec> {
        GridSpec::uniform(&self.lower, &self.upper, step)
    }
}

pub type NativeFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;
pub type Membership = Arc<dyn Fn(&[f64], &[f64]) -> bool + Send + Sync>;
/// `(x, point, tol)`: with `tol = 0` exact membership (open boundaries respected);
/// with `tol > 0` a conservative test that the point lies within `tol` of the set.
pub type SetOracle = Arc<dyn Fn(&[f64], &[f64], f64) -> bool + Send + Sync>;
pub type PointsFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// Vector-valued evaluator `(x, y) ↦ R^out`.
#[derive(Clone)]
pub struct VectorFn {
    out: usize,
    kind: FnKind,
}

#[derive(Clone)]
enum FnKind {
    Native(NativeFn, String),
    Exprs(Vec<Expr>),
}

impl fmt::Debug for VectorFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorFn({})", self.describe())
    }
}

impl VectorFn {
    pub fn native(out: usize, label: &str, f: impl Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        VectorFn { out, kind: FnKind::Native(Arc::new(f), label.to_string()) }
    }

    pub fn exprs(exprs: Vec<Expr>) -> Self {
        VectorFn { out: exprs.len(), kind: FnKind::Exprs(exprs) }
    }

    pub fn parse(srcs: &[String], n: usize, m: usize) -> Result<Self> {
        Ok(Self::exprs(srcs.iter().map(|s| Expr::parse(s, n, m)).collect::<Result<_>>()?))
    }

    pub fn out_dim(&self) -> usize {
        self.out
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FnKind::Native(_, l) => l.clone(),
            FnKind::Exprs(e) => format!("({})", e.iter().map(Expr::source).collect::<Vec<_>>().join(", ")),
        }
    }

    #[inline]
    pub fn eval_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        match &self.kind {
            FnKind::Native(f, _) => f(x, y, out),
            FnKind::Exprs(es) => {
                for (o, e) in out.iter_mut().zip(es) {
                    *o = e.eval(x, y);
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out];
        self.eval_into(x, y, &mut out);
        out
    }
}

/// Polyhedral data `{y : Ax + By ≤ d}` kept exact, with float copies for filtering.
#[derive(Clone, Debug)]
pub struct PolyData {
    pub a: Vec<QVec>,
    pub b: Vec<QVec>,
    pub d: QVec,
    af: Vec<Vec<f64>>,
    bf: Vec<Vec<f64>>,
    df: Vec<f64>,
    bounded: bool,
}

impl PolyData {
    pub fn new(a: Vec<QVec>, b: Vec<QVec>, d: QVec, n: usize, m: usize) -> Result<Self> {
        check_dim(a.len(), b.len())?;
        check_dim(a.len(), d.len())?;
        for (ra, rb) in a.iter().zip(&b) {
            check_dim(n, ra.len())?;
            check_dim(m, rb.len())?;
        }
        let bounded = recession_is_trivial(&b, m)?;
        Ok(PolyData {
            af: a.iter().map(|r| vec_to_f64(r)).collect(),
            bf: b.iter().map(|r| vec_to_f64(r)).collect(),
            df: vec_to_f64(&d),
            a,
            b,
            d,
            bounded,
        })
    }

    pub fn contains(&self, x: &[f64], y: &[f64]) -> bool {
        self.af.iter().zip(&self.bf).zip(&self.df).all(|((ra, rb), di)| {
            let s: f64 =
                ra.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + rb.iter().zip(y).map(|(u, v)| u * v).sum::<f64>();
            s <= di + FEAS_TOL
        })
    }

    /// Whether `{y : By ≤ d'}` is bounded for every right-hand side.
    pub fn bounded(&self) -> bool {
        self.bounded
    }
}

fn recession_is_trivial(b: &[QVec], m: usize) -> Result<bool> {
    for i in 0..m {
        for s in [1i64, -1] {
            let mut obj = vec![q(0); m];
            obj[i] = q(-s);
            let mut lp = LinearProgram::free_le(obj, b.to_vec(), vec![q(0); b.len()]);
            let mut e = vec![q(0); m];
            e[i] = q(s);
            lp.push_row(e, Sense::Le, q(1));
            match lp_solve(&lp)? {
                LpOutcome::Optimal(sol) if sol.value.is_negative() => return Ok(false),
                LpOutcome::Optimal(_) => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Feasibility mapping Γ.
#[derive(Clone)]
pub enum Feasibility {
    Box(BoxRegion),
    Polyhedral { data: PolyData, truncation: Option<BoxRegion> },
    Oracle { contains: Membership, truncation: BoxRegion, truncates: bool },
}

impl fmt::Debug for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feasibility::Box(b) => write!(f, "Box({b:?})"),
            Feasibility::Polyhedral { data, truncation } => {
                write!(f, "Polyhedral({} rows, truncation {truncation:?})", data.d.len())
            }
            Feasibility::Oracle { truncation, truncates, .. } => {
                write!(f, "Oracle(truncation {truncation:?}, truncates {truncates})")
            }
        }
    }
}

impl Feasibility {
    pub fn contains(&self, x: &[f64], y: &[f64]) -> bool {
        match self {
            Feasibility::Box(b) => b.contains(y, FEAS_TOL),
            Feasibility::Polyhedral { data, truncation } => {
                data.contains(x, y) && truncation.as_ref().is_none_or(|t| t.contains(y, FEAS_TOL))
            }
            Feasibility::Oracle { contains, truncation, .. } => truncation.contains(y, FEAS_TOL) && contains(x, y),
        }
    }

    /// Box in which the sampled part of Γ(x) lives; `None` when Γ is unbounded and untruncated.
    pub fn sampling_box(&self) -> Option<&BoxRegion> {
        match self {
            Feasibility::Box(b) => Some(b),
            Feasibility::Polyhedral { truncation, .. } => truncation.as_ref(),
            Feasibility::Oracle { truncation, .. } => Some(truncation),
        }
    }

    /// The truncation box when it actually cuts Γ (source of boundary artifacts).
    pub fn cutting_box(&self) -> Option<&BoxRegion> {
        match self {
            Feasibility::Box(_) => None,
            Feasibility::Polyhedral { data, truncation } => truncation.as_ref().filter(|_| !data.bounded()),
            Feasibility::Oracle { truncation, truncates, .. } => truncates.then_some(truncation),
        }
    }

    pub fn is_bounded_or_truncated(&self) -> bool {
        match self {
            Feasibility::Polyhedral { data, truncation } => data.bounded() || truncation.is_some(),
            _ => true,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Feasibility::Box(_) => "box",
            Feasibility::Polyhedral { .. } => "polyhedral",
            Feasibility::Oracle { .. } => "oracle",
        }
    }
}

/// Analytic membership oracles for catalog problems.
#[derive(Clone, Default)]
pub struct Oracles {
    pub psi: Option<SetOracle>,
    pub psi_w: Option<SetOracle>,
    pub psi_bar: Option<SetOracle>,
    pub phi: Option<SetOracle>,
    pub phi_w: Option<SetOracle>,
    pub phi_bar: Option<SetOracle>,
    pub phi_minus_c: Option<SetOracle>,
    /// Extra sampling points per x (critical coordinates and points approaching them).
    pub probes: Option<PointsFn>,
    /// Analytically critical decision points per x, used by closedness diagnostics.
    pub critical: Option<PointsFn>,
}

/// Linear-case data `f(x,y) = Dy`, `Γ(x) = {y : Ax + By ≤ d}`.
#[derive(Clone, Debug)]
pub struct LinearData {
    pub d_mat: Vec<QVec>,
    pub poly: PolyData,
}

#[derive(Clone)]
pub struct ParametricMop {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub f: VectorFn,
    pub gamma: Feasibility,
    pub cone: OrderingCone,
    pub x_box: BoxRegion,
    pub oracles: Oracles,
    /// Absolute dominance tolerance τ in dual coordinates.
    pub dominance_tol: f64,
    /// `f(x,·)` is C-convex and Γ(x) convex for every x.
    pub convex: bool,
    pub default_y_grid: Option<GridSpec>,
    pub linear: Option<LinearData>,
}

impl fmt::Debug for ParametricMop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricMop")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("f", &self.f)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}

impl ParametricMop {
    pub fn validate(&self) -> Result<()> {
        check_dim(self.q, self.f.out_dim())?;
        check_dim(self.q, self.cone.dim())?;
        check_dim(self.n, self.x_box.dim())?;
        if let Some(b) = self.gamma.sampling_box() {
            check_dim(self.m, b.dim())?;
        }
        if let Some(g) = &self.default_y_grid {
            check_dim(self.m, g.dim())?;
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.f.eval(x, y)
    }

    pub fn check_x(&self, x: &[f64]) -> Result<()> {
        check_dim(self.n, x.len())?;
        if !self.x_box.contains(x, 1e-9) {
            return Err(Error::Invalid(format!("parameter {x:?} outside the parameter box")));
        }
        Ok(())
    }

    pub fn check_y(&self, x: &[f64], y: &[f64]) -> Result<()> {
        check_dim(self.m, y.len())?;
        if !self.gamma.contains(x, y) {
            return Err(Error::Infeasible(format!("y = {y:?} is not in Γ({x:?})")));
        }
        Ok(())
    }

    pub fn extra_probes(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.oracles.probes.as_ref().map(|p| p(x)).unwrap_or_default()
    }

    pub fn critical_points(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.oracles.critical.as_ref().map(|p| p(x)).unwrap_or_default()
    }

    /// Default decision grid: the catalog's, else the sampling box at 1/100.
    pub fn y_grid(&self) -> Result<GridSpec> {
        match (&self.default_y_grid, self.gamma.sampling_box()) {
            (Some(g), _) => Ok(g.clone()),
            (None, Some(b)) => b.grid(0.01),
            (None, None) => Err(Error::Unbounded),
        }
    }
}

/// Feasible grid points of Γ(x), lexicographically ordered; probe points are
/// force-included when feasible.
pub fn feasible_sample(problem: &ParametricMop, x: &[f64], grid: &GridSpec) -> Result<Points> {
    feasible_sample_with(problem, x, grid, &[])
}

/// [`feasible_sample`] with additional probe points.
pub fn feasible_sample_with(problem: &ParametricMop, x: &[f64], grid: &GridSpec, extra: &[Vec<f64>]) -> Result<Points> {
    problem.check_x(x)?;
    check_dim(problem.m, grid.dim())?;
    if !problem.gamma.is_bounded_or_truncated() {
        return Err(Error::Unbounded);
    }
    let mut probes = problem.extra_probes(x);
    probes.extend(extra.iter().cloned());
    let all = grid.points_with(&probes)?;
    let mut out = Points::new(problem.m);
    for y in all.iter() {
        if problem.gamma.contains(x, y) {
            out.push(y);
        }
    }
    Ok(out)
}
