//! Local polyhedral models of graph mappings at catalog reference points,
//! golden-file comparison, and the coderivative estimate checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::normal::{coderivative_slice, inclusion_check, limiting_normal_cone_union, ConeUnion, SetUnion};
use super::polyhedron::{constraint, ConvexPolyhedron, PolyUnion};
use crate::cones::OrderingCone;
use crate::error::{check_dim, Error, Result};
use crate::lp::Sense::{self, Ge, Le};
use crate::rational::{qv, unwrap_vec, wrap_vec, QVec, Rat, Q};

pub const GOLDEN_EX_4_1: &str = include_str!("../../golden/ex_4_1.json");
pub const GOLDEN_EX_4_2: &str = include_str!("../../golden/ex_4_2.json");

/// Catalog ids that carry local models.
pub const MODEL_IDS: &[&str] = &["ex_4_1", "ex_4_2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// gph Σ in (x, z).
    Sigma,
    /// gph (Σ + C) in (x, z).
    SigmaPlusC,
    /// gph Φ in (x, z).
    Phi,
    /// gph Φw in (x, z).
    PhiW,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Sigma => "sigma",
            GraphKind::SigmaPlusC => "sigma_plus_c",
            GraphKind::Phi => "phi",
            GraphKind::PhiW => "phi_w",
        }
    }
}

/// A point `ȳ ∈ Ψw(x̄)` with `f(x̄,ȳ) = z̄`, the Jacobians there, and local
/// models of gph Ψw and gph Γ around `(x̄,ȳ)`.
#[derive(Clone, Debug)]
pub struct Preimage {
    pub y_bar: QVec,
    /// `f'_x(x̄,ȳ)`, q rows of length n.
    pub fx: Vec<QVec>,
    /// `f'_y(x̄,ȳ)`, q rows of length m.
    pub fy: Vec<QVec>,
    pub psi_w: PolyUnion,
    pub gamma: PolyUnion,
}

#[derive(Clone, Debug)]
pub struct LocalModels {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub cone: OrderingCone,
    pub x_bar: QVec,
    pub z_bar: QVec,
    pub graphs: BTreeMap<GraphKind, PolyUnion>,
    pub preimages: Vec<Preimage>,
    /// How the models relate to the true graphs.
    pub reduction: &'static str,
}

fn poly(dim: usize, cons: &[(&[i64], Sense, i64)]) -> Result<ConvexPolyhedron> {
    let c: Vec<_> = cons.iter().map(|(r, s, b)| constraint(r, *s, *b)).collect();
    ConvexPolyhedron::from_constraints(dim, &c)
}

fn ex_4_1() -> Result<LocalModels> {
    // coordinates (x, z1, z2); every set is a product R × (planar set)
    let gamma = poly(3, &[(&[0, 1, 2], Ge, 0), (&[0, 2, 1], Ge, 0), (&[0, 1, 0], Le, 2), (&[0, 0, 1], Le, 2)])?;
    let plus_c = poly(3, &[(&[0, 1, 2], Ge, 0), (&[0, 2, 1], Ge, 0)])?;
    let seg_left = poly(3, &[(&[0, 2, 1], Sense::Eq, 0), (&[0, 1, 0], Ge, -1), (&[0, 1, 0], Le, 0)])?;
    let seg_right = poly(3, &[(&[0, 1, 2], Sense::Eq, 0), (&[0, 1, 0], Ge, 0), (&[0, 1, 0], Le, 2)])?;
    let segs = vec![seg_left, seg_right];
    let mut graphs = BTreeMap::new();
    graphs.insert(GraphKind::Sigma, PolyUnion::new("gph Sigma", vec![gamma.clone()])?);
    graphs.insert(GraphKind::SigmaPlusC, PolyUnion::new("gph (Sigma + C)", vec![plus_c])?);
    graphs.insert(GraphKind::Phi, PolyUnion::new("gph Phi", segs.clone())?);
    graphs.insert(GraphKind::PhiW, PolyUnion::new("gph Phi_w", segs.clone())?);
    let pre = Preimage {
        y_bar: qv(&[0, 0]),
        fx: vec![qv(&[0]), qv(&[0])],
        fy: vec![qv(&[1, 0]), qv(&[0, 1])],
        psi_w: PolyUnion::new("gph Psi_w", segs)?,
        gamma: PolyUnion::new("gph Gamma", vec![gamma])?,
    };
    Ok(LocalModels {
        id: "ex_4_1".into(),
        n: 1,
        m: 2,
        q: 2,
        cone: OrderingCone::orthant(2),
        x_bar: qv(&[0]),
        z_bar: qv(&[0, 0]),
        graphs,
        preimages: vec![pre],
        reduction: "exact: f(x,y) = y and Γ is constant, so every graph is R times a planar polyhedral set \
                    (Σ(0) = Γ, Σ(0) + C = the cone cut by the two lower constraints, Φ(0) = Φw(0) = Ψw(0) \
                    = the two segments near the origin)",
    })
}

fn ex_4_2() -> Result<LocalModels> {
    // (x, z1, z2) for the image-space graphs, (x, y) for Ψw and Γ
    let sigma = poly(3, &[(&[0, 1, 0], Sense::Eq, 0), (&[0, 0, 1], Ge, 0)])?;
    let plus_c = poly(3, &[(&[0, 1, 0], Ge, 0), (&[0, 0, 1], Ge, 0)])?;
    let fan = poly(3, &[(&[1, 0, 0], Le, 0), (&[0, 1, 0], Sense::Eq, 0), (&[0, 0, 1], Ge, 0)])?;
    let ray = poly(3, &[(&[1, 0, 0], Ge, 0), (&[0, 1, 0], Sense::Eq, 0), (&[0, 0, 1], Sense::Eq, 0)])?;
    let mut graphs = BTreeMap::new();
    graphs.insert(GraphKind::Sigma, PolyUnion::new("gph Sigma (tangent model)", vec![sigma])?);
    graphs.insert(GraphKind::SigmaPlusC, PolyUnion::new("gph (Sigma + C) (tangent model)", vec![plus_c])?);
    graphs.insert(GraphKind::PhiW, PolyUnion::new("gph Phi_w (tangent model)", vec![fan, ray])?);
    let psi_left = poly(2, &[(&[1, 0], Le, 0), (&[0, 1], Ge, 0), (&[0, 1], Le, 1)])?;
    let psi_right = poly(2, &[(&[1, 0], Ge, 0), (&[0, 1], Sense::Eq, 0)])?;
    let gamma = poly(2, &[(&[0, 1], Ge, 0), (&[0, 1], Le, 1)])?;
    let pre = Preimage {
        y_bar: qv(&[0]),
        fx: vec![qv(&[0]), qv(&[0])],
        fy: vec![qv(&[0]), qv(&[1])],
        psi_w: PolyUnion::new("gph Psi_w", vec![psi_left, psi_right])?,
        gamma: PolyUnion::new("gph Gamma", vec![gamma])?,
    };
    Ok(LocalModels {
        id: "ex_4_2".into(),
        n: 1,
        m: 1,
        q: 2,
        cone: OrderingCone::orthant(2),
        x_bar: qv(&[0]),
        z_bar: qv(&[0, 0]),
        graphs,
        preimages: vec![pre],
        reduction: "gph Σ = {(x, tx, t) : t ∈ [0,1]} is replaced by its tangent cone {z1 = 0, z2 ≥ 0}; \
                    gph (Σ + C) by {z1 ≥ 0, z2 ≥ 0}; the fan part {(x, tx, t) : x ≤ 0} of gph Φw by \
                    {x ≤ 0, z1 = 0, z2 ≥ 0}, keeping the exact ray {x ≥ 0, z = 0}. The bilinear term xt \
                    is second order at the origin, so tangent cones coincide, and the limiting normals \
                    of the true sets at nearby points converge into the model cones. gph Ψw and gph Γ \
                    are polyhedral and stored exactly.",
    })
}

pub fn local_models(id: &str) -> Result<LocalModels> {
    match id {
        "ex_4_1" => ex_4_1(),
        "ex_4_2" => ex_4_2(),
        _ => Err(Error::NoModels(id.to_string())),
    }
}

impl LocalModels {
    /// The reference point `(x̄, z̄)` of the image-space graphs.
    pub fn point(&self) -> QVec {
        self.x_bar.iter().chain(&self.z_bar).cloned().collect()
    }

    /// Every modeled set with its label and reference point: the image-space
    /// graphs at `(x̄, z̄)`, then Ψw and Γ of each preimage at `(x̄, ȳ)`.
    pub fn labeled_sets(&self) -> Vec<(String, &PolyUnion, QVec)> {
        let mut out: Vec<_> =
            self.graphs.iter().map(|(k, u)| (format!("{}/{}", self.id, k.as_str()), u, self.point())).collect();
        for p in &self.preimages {
            let at: QVec = self.x_bar.iter().chain(&p.y_bar).cloned().collect();
            out.push((format!("{}/psi_w", self.id), &p.psi_w, at.clone()));
            out.push((format!("{}/gamma", self.id), &p.gamma, at));
        }
        out
    }

    pub fn graph(&self, kind: GraphKind) -> Result<&PolyUnion> {
        self.graphs.get(&kind).ok_or_else(|| Error::NoModels(format!("{}: {}", self.id, kind.as_str())))
    }

    pub fn normal_cone(&self, kind: GraphKind) -> Result<ConeUnion> {
        limiting_normal_cone_union(self.graph(kind)?, &self.point())
    }

    /// Normal cones of every stored graph; Ψw and Γ keyed by preimage index.
    pub fn all_normal_cones(&self) -> Result<BTreeMap<String, ConeUnion>> {
        let mut out = BTreeMap::new();
        for &k in self.graphs.keys() {
            out.insert(k.as_str().to_string(), self.normal_cone(k)?);
        }
        for (i, p) in self.preimages.iter().enumerate() {
            let at: QVec = self.x_bar.iter().chain(&p.y_bar).cloned().collect();
            let suffix = if i == 0 { String::new() } else { format!("@{i}") };
            out.insert(format!("psi_w{suffix}"), limiting_normal_cone_union(&p.psi_w, &at)?);
            out.insert(format!("gamma{suffix}"), limiting_normal_cone_union(&p.gamma, &at)?);
        }
        Ok(out)
    }

    /// `D*F(x̄,z̄)(z*)` for an image-space graph.
    pub fn coderivative(&self, kind: GraphKind, z_star: &[Q]) -> Result<SetUnion> {
        check_dim(self.q, z_star.len())?;
        coderivative_slice(&self.normal_cone(kind)?, self.n, z_star)
    }
}

fn transpose_apply(rows: &[QVec], v: &[Q]) -> QVec {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols).map(|j| rows.iter().zip(v).map(|(r, vi)| &r[j] * vi).sum()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// `D*Φw(z*) ⊂ D*(Σ+C)(z*)`, valid for `z* ∈ C*_>` under weak domination.
    WeakFrontier,
    /// `D*Φ(z*) ⊂ D*Σ(z*)` for all `z*`; false in general.
    FrontierViaSigma,
    /// `D*Φw(z*) ⊂ ∪ {f'_xᵀz* + D*Γ(f'_yᵀz*)}` for `z* ∈ C*_>`, smooth f.
    ViaFeasibleMap,
    /// `D*Φw(z*) ⊂ ∪ {f'_xᵀz* + D*Ψw(f'_yᵀz*)}` for all `z*`.
    ViaSolutionMap,
}

impl Estimate {
    pub const ALL: [Estimate; 4] =
        [Estimate::WeakFrontier, Estimate::FrontierViaSigma, Estimate::ViaFeasibleMap, Estimate::ViaSolutionMap];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimate::WeakFrontier => "weak_frontier",
            Estimate::FrontierViaSigma => "frontier_via_sigma",
            Estimate::ViaFeasibleMap => "via_feasible_map",
            Estimate::ViaSolutionMap => "via_solution_map",
        }
    }

    /// Whether the estimate is only claimed for `z* ∈ C*_>`.
    pub fn needs_strict_dual(self) -> bool {
        matches!(self, Estimate::WeakFrontier | Estimate::ViaFeasibleMap)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Estimate::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| {
            let valid: Vec<&str> = Estimate::ALL.iter().map(|e| e.as_str()).collect();
            Error::Invalid(format!("unknown estimate `{s}`; valid: {}", valid.join(", ")))
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub catalog_id: String,
    pub estimate: Estimate,
    pub point: Vec<Rat>,
    pub z_star: Vec<Rat>,
    /// Whether `z* ∈ C*_>`.
    pub z_star_in_strict_dual: bool,
    /// Whether the estimate's hypothesis on `z*` is met.
    pub hypothesis_met: bool,
    pub lhs: SetUnion,
    pub rhs: SetUnion,
    pub lhs_text: String,
    pub rhs_text: String,
    pub holds: bool,
    /// `rhs ⊆ lhs` as well.
    pub equality: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Rat>>,
}

/// Builds both sides of an estimate from the local models and decides the inclusion exactly.
pub fn estimate_check(id: &str, point: Option<&[Q]>, z_star: &[Q], which: Estimate) -> Result<EstimateReport> {
    let m = local_models(id)?;
    check_dim(m.q, z_star.len())?;
    if let Some(p) = point {
        if p != m.point().as_slice() {
            return Err(Error::Invalid(format!("{id}: local models exist only at the reference point")));
        }
    }
    let (lhs, rhs) = match which {
        Estimate::FrontierViaSigma => {
            (m.coderivative(GraphKind::Phi, z_star)?, m.coderivative(GraphKind::Sigma, z_star)?)
        }
        Estimate::WeakFrontier => {
            (m.coderivative(GraphKind::PhiW, z_star)?, m.coderivative(GraphKind::SigmaPlusC, z_star)?)
        }
        Estimate::ViaFeasibleMap | Estimate::ViaSolutionMap => {
            let mut rhs = SetUnion::empty(m.n);
            for p in &m.preimages {
                let graph = if which == Estimate::ViaFeasibleMap { &p.gamma } else { &p.psi_w };
                let at: QVec = m.x_bar.iter().chain(&p.y_bar).cloned().collect();
                let nc = limiting_normal_cone_union(graph, &at)?;
                let y_star = transpose_apply(&p.fy, z_star);
                let shift = transpose_apply(&p.fx, z_star);
                rhs = rhs.union(coderivative_slice(&nc, m.n, &y_star)?.translate(&shift)?)?;
            }
            (m.coderivative(GraphKind::PhiW, z_star)?, super::normal::simplify(rhs)?)
        }
    };
    let inc = inclusion_check(&lhs, &rhs)?;
    let back = inclusion_check(&rhs, &lhs)?;
    let strict = m.cone.strict_dual_contains_exact(z_star)?;
    Ok(EstimateReport {
        catalog_id: id.to_string(),
        estimate: which,
        point: wrap_vec(&m.point()),
        z_star: wrap_vec(z_star),
        z_star_in_strict_dual: strict,
        hypothesis_met: strict || !which.needs_strict_dual(),
        lhs_text: lhs.describe(),
        rhs_text: rhs.describe(),
        lhs,
        rhs,
        holds: inc.holds,
        equality: inc.holds && back.holds,
        witness: inc.witness,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldenFile {
    catalog_id: String,
    point: Vec<Rat>,
    normal_cones: BTreeMap<String, ConeUnion>,
    slices: Vec<GoldenSliceSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldenSliceSpec {
    graph: GraphKind,
    z_star: Vec<Rat>,
    set: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenCone {
    pub graph: String,
    pub expected: ConeUnion,
    pub computed: ConeUnion,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenSlice {
    pub graph: GraphKind,
    pub z_star: Vec<Rat>,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub catalog_id: String,
    pub point: Vec<Rat>,
    pub reduction: String,
    pub cones: Vec<GoldenCone>,
    pub slices: Vec<GoldenSlice>,
    pub passed: bool,
}

pub fn golden_text(id: &str) -> Result<&'static str> {
    match id {
        "ex_4_1" => Ok(GOLDEN_EX_4_1),
        "ex_4_2" => Ok(GOLDEN_EX_4_2),
        _ => Err(Error::NoModels(id.to_string())),
    }
}

/// Compares the computed normal cones and slices with a golden file, exactly.
pub fn golden_check_with(id: &str, golden: &str) -> Result<GoldenReport> {
    let g: GoldenFile = serde_json::from_str(golden)?;
    if g.catalog_id != id {
        return Err(Error::Spec(format!("golden file is for `{}`, not `{id}`", g.catalog_id)));
    }
    let m = local_models(id)?;
    if unwrap_vec(&g.point) != m.point() {
        return Err(Error::Spec("golden reference point differs from the models".into()));
    }
    let computed = m.all_normal_cones()?;
    let mut cones = Vec::new();
    for (name, expected) in g.normal_cones {
        let got = computed.get(&name).cloned().ok_or_else(|| Error::NoModels(format!("{id}: {name}")))?;
        cones.push(GoldenCone { matches: got == expected, graph: name, expected, computed: got });
    }
    let mut slices = Vec::new();
    for s in g.slices {
        let got = m.coderivative(s.graph, &unwrap_vec(&s.z_star))?.describe();
        slices.push(GoldenSlice {
            graph: s.graph,
            z_star: s.z_star,
            matches: got == s.set,
            expected: s.set,
            computed: got,
        });
    }
    let passed = cones.iter().all(|c| c.matches) && slices.iter().all(|s| s.matches);
    Ok(GoldenReport {
        catalog_id: id.into(),
        point: wrap_vec(&m.point()),
        reduction: m.reduction.into(),
        cones,
        slices,
        passed,
    })
}

pub fn golden_check(id: &str) -> Result<GoldenReport> {
    golden_check_with(id, golden_text(id)?)
}

/// Vectors of `int R^q_+` with small integer entries, in a fixed order.
pub fn strict_dual_sample(count: usize) -> Vec<QVec> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1i64;
    'outer: loop {
        for a in 1..=k {
            for b in 1..=k {
                if a.max(b) == k {
                    out.push(qv(&[a, b]));
                    if out.len() == count {
                        break 'outer;
                    }
                }
            }
        }
        k += 1;
    }
    out
}
