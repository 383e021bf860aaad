//! Grid solve, existence diagnostics and cross-concept comparison.

use std::io::Write;

use serde::Serialize;

use super::{BilevelInstance, SolveOptions};
use crate::dominance::{dominates, efficient_flat, Strength};
use crate::error::Result;
use crate::mappings::{
    probe_mapping, psi_sample, ClosednessVerdict, CloudMeta, Concept, GraphCloud, GraphRecord, GraphSpace, Truncation,
    Verdict, DEFAULT_LEVELS,
};
use crate::parametric::GridSpec;
use crate::spatial::{dist, SpatialHash};

/// A pair `(x, y)` with its upper-level value `F(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: Vec<f64>,
    /// No pair within the local radius K-dominates this one.
    pub local_min: bool,
}

/// One feasible discrete pair with its classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: Vec<f64>,
    pub efficient: bool,
    pub weakly_efficient: bool,
    pub local_min: bool,
}

impl Pair {
    fn record(&self) -> PairRecord {
        PairRecord { x: self.x.clone(), y: self.y.clone(), value: self.value.clone(), local_min: self.local_min }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosednessFlag {
    pub x: Vec<f64>,
    /// The probed decision: a minimizer itself or a critical point near one.
    pub y: Vec<f64>,
    pub at_minimizer: bool,
    /// Distance in decision space to the minimizer that triggered the probe.
    pub distance: f64,
    pub probe: ClosednessVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridMeta {
    pub x_grid: GridSpec,
    pub y_grid: GridSpec,
    pub x_points: usize,
    pub x_in_set: usize,
    pub levels: u32,
    pub local_radius_steps: f64,
    /// Per-axis radius of the local-minimality neighborhood, `x` axes first.
    pub local_radius: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub concept: Concept,
    /// A discrete minimizer exists (the feasible discrete set is nonempty).
    pub existence: bool,
    pub reason: Option<String>,
    pub feasible_pairs: usize,
    pub efficient: Vec<PairRecord>,
    pub weakly_efficient: Vec<PairRecord>,
    pub local_minimizers: Vec<PairRecord>,
    pub closedness: Vec<ClosednessFlag>,
    /// Some minimizer sits next to a missing limit point of the lower-level graph.
    pub flagged_missing_limit_point: bool,
    pub truncation: Truncation,
    pub artifacts: usize,
    pub grids: GridMeta,
    pub caveats: Vec<String>,
    #[serde(skip)]
    pub pairs: Vec<Pair>,
    #[serde(skip)]
    pub cloud: GraphCloud,
}

impl SolveReport {
    /// For scalar `F`: the efficient pair of least value (first in grid order on ties).
    pub fn minimizer(&self) -> Option<&PairRecord> {
        self.efficient.iter().min_by(|a, b| a.value.iter().sum::<f64>().total_cmp(&b.value.iter().sum()))
    }

    /// CSV of every feasible pair: `x.., y.., F.., efficient, weakly_efficient, local_min`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let (n, m) = (self.cloud.n, self.cloud.m);
        let p = self.pairs.first().map_or(0, |q| q.value.len());
        let mut header: Vec<String> = Vec::new();
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=m).map(|i| format!("y{i}")));
        header.extend((1..=p).map(|i| format!("F{i}")));
        header.extend(["efficient", "weakly_efficient", "local_min"].map(String::from));
        wr.write_record(&header)?;
        for q in &self.pairs {
            let mut row: Vec<String> = q.x.iter().chain(&q.y).chain(&q.value).map(|v| format!("{v:?}")).collect();
            row.extend([q.efficient, q.weakly_efficient, q.local_min].map(|b| u8::from(b).to_string()));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn fmt_point(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

/// Samples gph Ψ̂ over the X-feasible part of the parameter grid.
fn sample_graph(
    inst: &BilevelInstance,
    concept: Concept,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
) -> Result<(GraphCloud, usize, usize)> {
    let levels = if concept == Concept::Bar { DEFAULT_LEVELS } else { 1 };
    let lower = &inst.lower;
    let mut cloud = GraphCloud::empty(lower, CloudMeta::new(lower, x_grid, y_grid, levels));
    let xs = x_grid.points()?;
    let mut in_set = 0;
    for x in xs.iter() {
        if !inst.x_set.contains(&[], x) {
            continue;
        }
        in_set += 1;
        let s = psi_sample(lower, x, y_grid, concept)?;
        let recs = s.decisions.iter().zip(s.images.iter()).map(|(y, z)| GraphRecord {
            x: x.to_vec(),
            y: y.to_vec(),
            z: z.to_vec(),
            concept,
        });
        cloud.absorb(recs, x, s.truncation, s.artifacts.len());
    }
    Ok((cloud, xs.len(), in_set))
}

pub fn solve(inst: &BilevelInstance, concept: Concept, x_grid: &GridSpec, y_grid: &GridSpec) -> Result<SolveReport> {
    solve_with(inst, concept, x_grid, y_grid, &SolveOptions::default())
}

pub fn solve_with(
    inst: &BilevelInstance,
    concept: Concept,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    inst.validate()?;
    let (cloud, x_points, x_in_set) = sample_graph(inst, concept, x_grid, y_grid)?;
    let p = inst.p();
    let (n, m) = (cloud.n, cloud.m);

    let mut values = vec![0.0; cloud.len() * p];
    for (r, out) in cloud.records.iter().zip(values.chunks_exact_mut(p)) {
        inst.upper.eval_into(&r.x, &r.y, out);
    }
    let eff = efficient_flat(&values, p, &inst.cone, inst.upper_tol, Strength::Strong);
    let weak = efficient_flat(&values, p, &inst.cone, inst.upper_tol, Strength::Weak);

    let scales: Vec<f64> = x_grid.step.iter().chain(&y_grid.step).map(|&h| if h > 0.0 { h } else { 1.0 }).collect();
    let local = local_minima(&cloud, &values, p, inst, &scales, opts.local_radius_steps);
    let local_radius: Vec<f64> = scales.iter().map(|h| h * opts.local_radius_steps).collect();
    let y_radius = opts.local_radius_steps * y_grid.max_step();

    let mut pairs: Vec<Pair> = cloud
        .records
        .iter()
        .zip(values.chunks_exact(p))
        .zip(&local)
        .map(|((r, v), &lm)| Pair {
            x: r.x.clone(),
            y: r.y.clone(),
            value: v.to_vec(),
            efficient: false,
            weakly_efficient: false,
            local_min: lm,
        })
        .collect();
    for &i in &eff {
        pairs[i].efficient = true;
    }
    for &i in &weak {
        pairs[i].weakly_efficient = true;
    }

    let grids = GridMeta {
        x_grid: x_grid.clone(),
        y_grid: y_grid.clone(),
        x_points,
        x_in_set,
        levels: cloud.meta.levels,
        local_radius_steps: opts.local_radius_steps,
        local_radius,
    };
    let mut caveats = vec![format!(
        "local minimality is a grid convention: no feasible pair within {} grid steps (per axis, Euclidean in step \
         units) K-dominates",
        opts.local_radius_steps
    )];
    let reason = if x_in_set == 0 {
        Some("no grid parameter lies in X".to_string())
    } else if pairs.is_empty() {
        Some(format!("empty feasible discrete set: gph psi_{concept} ∩ (X × R^{m}) has no grid points"))
    } else {
        None
    };

    let efficient: Vec<PairRecord> = pairs.iter().filter(|q| q.efficient).map(Pair::record).collect();
    let weakly_efficient: Vec<PairRecord> = pairs.iter().filter(|q| q.weakly_efficient).map(Pair::record).collect();
    let local_minimizers: Vec<PairRecord> = pairs.iter().filter(|q| q.local_min).map(Pair::record).collect();

    let mut targets: Vec<&PairRecord> = Vec::new();
    for r in efficient.iter().chain(&local_minimizers) {
        if !targets.iter().any(|t| t.x == r.x && t.y == r.y) {
            targets.push(r);
        }
    }
    if targets.len() > opts.max_probed {
        caveats.push(format!("closedness probed at the first {} of {} minimizers", opts.max_probed, targets.len()));
        targets.truncate(opts.max_probed);
    }
    let closedness = probe_minimizers(inst, concept, y_grid, opts, &targets, y_radius, &mut caveats)?;
    let flagged = closedness.iter().any(|f| f.probe.verdict == Verdict::MissingLimitPoint);

    match cloud.meta.truncation {
        Truncation::None => {}
        Truncation::OracleConfirmed => caveats.push(format!(
            "Γ is cut by a truncation box; {} grid points were dropped by the analytic oracle as artifacts",
            cloud.meta.artifacts
        )),
        Truncation::UnconfirmedOnTruncatedBox => caveats.push(
            "Γ is cut by a truncation box and no oracle confirms the sample; minimizers may be box artifacts".into(),
        ),
    }
    if let Some(b) = inst.lower.gamma.cutting_box() {
        for r in &efficient {
            if b.on_boundary(&r.y, y_grid.max_step() * 1e-6) {
                caveats.push(format!("minimizer {} lies on the truncation box boundary", fmt_point(&r.y)));
            }
        }
    }
    if n == 0 {
        caveats.push("parameter space is zero-dimensional".into());
    }

    Ok(SolveReport {
        instance: inst.name.clone(),
        concept,
        existence: reason.is_none(),
        reason,
        feasible_pairs: pairs.len(),
        efficient,
        weakly_efficient,
        local_minimizers,
        closedness,
        flagged_missing_limit_point: flagged,
        truncation: cloud.meta.truncation,
        artifacts: cloud.meta.artifacts,
        grids,
        caveats,
        pairs,
        cloud,
    })
}

/// Pairs not K-dominated by any pair within `radius` grid steps in `(x, y)` space.
fn local_minima(
    cloud: &GraphCloud,
    values: &[f64],
    p: usize,
    inst: &BilevelInstance,
    scales: &[f64],
    radius: f64,
) -> Vec<bool> {
    let d = cloud.n + cloud.m;
    let coords: Vec<f64> =
        cloud.records.iter().flat_map(|r| r.x.iter().chain(&r.y).zip(scales).map(|(v, h)| v / h)).collect();
    let dual: Vec<Vec<f64>> = values.chunks_exact(p).map(|v| inst.cone.transform(v)).collect();
    let hash = SpatialHash::new(&coords, d, radius);
    (0..cloud.len())
        .map(|i| {
            let at = &coords[i * d..(i + 1) * d];
            !hash.visit_within(at, radius, |j, _| {
                j != i && dominates(&dual[j], &dual[i], inst.upper_tol, Strength::Strong)
            })
        })
        .collect()
}

fn probe_minimizers(
    inst: &BilevelInstance,
    concept: Concept,
    y_grid: &GridSpec,
    opts: &SolveOptions,
    targets: &[&PairRecord],
    radius: f64,
    caveats: &mut Vec<String>,
) -> Result<Vec<ClosednessFlag>> {
    let lower = &inst.lower;
    let Some(oracle) = concept.psi_oracle(lower) else {
        caveats.push(format!("no membership oracle for psi_{concept}; minimizers were not probed for closedness"));
        return Ok(vec![]);
    };
    let mut out: Vec<ClosednessFlag> = Vec::new();
    let mut off_set = 0;
    for t in targets {
        // a grid point off the exact set would always look like a missing limit point
        let mut points = Vec::new();
        if oracle(&t.x, &t.y, 0.0) {
            points.push((t.y.clone(), true));
        } else {
            off_set += 1;
        }
        for c in lower.critical_points(&t.x) {
            if c != t.y && dist(&c, &t.y) <= radius && lower.gamma.contains(&t.x, &c) {
                points.push((c, false));
            }
        }
        for (y, at_minimizer) in points {
            if out.iter().any(|f| f.x == t.x && f.y == y) {
                continue;
            }
            let Some(v) = probe_mapping(lower, concept, GraphSpace::Decision, &t.x, &y, Some(y_grid), &opts.probe)?
            else {
                continue;
            };
            if v.verdict == Verdict::MissingLimitPoint {
                caveats.push(format!(
                    "minimizer ({}, {}) lies within {:.3e} of ({}, {}), a missing limit point of gph psi_{concept}: \
                     the infimum may not be attained",
                    fmt_point(&t.x),
                    fmt_point(&t.y),
                    dist(&y, &t.y),
                    fmt_point(&t.x),
                    fmt_point(&y)
                ));
            }
            out.push(ClosednessFlag { x: t.x.clone(), distance: dist(&y, &t.y), y, at_minimizer, probe: v });
        }
    }
    if off_set > 0 {
        caveats.push(format!(
            "{off_set} minimizers are grid points off the exact set; only critical points near them were probed"
        ));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    /// Bounded only because a truncation box cuts Γ or X.
    TruncationBox,
    Unverified,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointProbe {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExistenceReport {
    pub instance: String,
    pub concept: Concept,
    pub nonempty: bool,
    pub feasible_pairs: usize,
    pub boundedness: Boundedness,
    pub probes: Vec<PointProbe>,
    /// `None` when the lower level has no membership oracle for the concept.
    pub closed: Option<bool>,
    pub hypotheses_met: bool,
    pub minimizers_found: bool,
    pub efficient: Vec<PairRecord>,
    pub flagged_missing_limit_point: bool,
    pub warnings: Vec<String>,
}

fn boundedness(inst: &BilevelInstance) -> Boundedness {
    let mut worst = Boundedness::Bounded;
    for f in [&inst.x_set, &inst.lower.gamma] {
        let b = if !f.is_bounded_or_truncated() {
            Boundedness::Unverified
        } else if f.cutting_box().is_some() {
            Boundedness::TruncationBox
        } else {
            Boundedness::Bounded
        };
        if b == Boundedness::Unverified || worst == Boundedness::Bounded {
            worst = b;
        }
    }
    worst
}

/// Checks the hypotheses of the existence theorem on the sampled graph and
/// reports them next to the outcome of the discrete solve.
pub fn existence_check(
    inst: &BilevelInstance,
    concept: Concept,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
) -> Result<ExistenceReport> {
    let opts = SolveOptions::default();
    let report = solve_with(inst, concept, x_grid, y_grid, &opts)?;
    let lower = &inst.lower;
    let mut warnings = Vec::new();
    let bounded = boundedness(inst);
    match bounded {
        Boundedness::Bounded => {}
        Boundedness::TruncationBox => {
            warnings.push("boundedness holds only relative to the truncation box; it is flagged, not asserted".into())
        }
        Boundedness::Unverified => warnings.push("boundedness of the feasible set could not be verified".into()),
    }
    if let Some(r) = &report.reason {
        warnings.push(r.clone());
    }

    let mut probes = Vec::new();
    let closed = if concept.psi_oracle(lower).is_some() {
        for x in report.cloud.xs().iter().chain(&report.cloud.meta.empty_at) {
            for y in lower.critical_points(x) {
                if !lower.gamma.contains(x, &y) {
                    continue;
                }
                if let Some(v) = probe_mapping(lower, concept, GraphSpace::Decision, x, &y, Some(y_grid), &opts.probe)?
                {
                    probes.push(PointProbe { x: x.clone(), y, verdict: v.verdict });
                }
            }
        }
        let missing: Vec<&PointProbe> = probes.iter().filter(|p| p.verdict == Verdict::MissingLimitPoint).collect();
        if let Some(first) = missing.first() {
            warnings.push(format!(
                "gph psi_{concept} is not closed: {} of {} probe points are missing limit points (first at ({}, {})); \
                 the existence theorem does not apply and the upper level may have no solution",
                missing.len(),
                probes.len(),
                fmt_point(&first.x),
                fmt_point(&first.y)
            ));
        }
        Some(missing.is_empty())
    } else {
        warnings.push(format!("no membership oracle for psi_{concept}; closedness not verified"));
        None
    };
    if report.flagged_missing_limit_point {
        warnings.push("a discrete minimizer sits next to a missing limit point: nonexistence is likely".into());
    }

    let nonempty = report.feasible_pairs > 0;
    Ok(ExistenceReport {
        instance: inst.name.clone(),
        concept,
        nonempty,
        feasible_pairs: report.feasible_pairs,
        boundedness: bounded,
        hypotheses_met: nonempty && bounded != Boundedness::Unverified && closed == Some(true),
        closed,
        probes,
        minimizers_found: !report.efficient.is_empty(),
        efficient: report.efficient,
        flagged_missing_limit_point: report.flagged_missing_limit_point,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConceptSummary {
    pub concept: Concept,
    pub feasible_pairs: usize,
    pub minimizers: Vec<PairRecord>,
    pub local_minimizers: Vec<PairRecord>,
    pub flagged_missing_limit_point: bool,
    pub caveats: Vec<String>,
}

/// Records of `subset` that do not lie in `superset`'s graph.
///
/// Membership is decided by the superset's analytic oracle at one grid step when
/// the lower level has one, else by a record of `superset` at the same parameter
/// within the chain tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct ChainCheck {
    pub subset: Concept,
    pub superset: Concept,
    /// `oracle` or `records`.
    pub method: &'static str,
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub instance: String,
    pub concepts: Vec<ConceptSummary>,
    /// eff ⊆ bar ⊆ weff on the sampled graphs.
    pub chain: Vec<ChainCheck>,
    pub chain_tol: f64,
    #[serde(skip)]
    pub reports: Vec<SolveReport>,
}

const CONCEPTS: [Concept; 3] = [Concept::Eff, Concept::Bar, Concept::Weff];

/// Solves for all three concepts on shared grids and checks the record inclusion chain.
pub fn compare_concepts(inst: &BilevelInstance, x_grid: &GridSpec, y_grid: &GridSpec) -> Result<ComparisonReport> {
    compare_concepts_with(inst, x_grid, y_grid, &SolveOptions::default())
}

pub fn compare_concepts_with(
    inst: &BilevelInstance,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
    opts: &SolveOptions,
) -> Result<ComparisonReport> {
    let reports = CONCEPTS.iter().map(|&c| solve_with(inst, c, x_grid, y_grid, opts)).collect::<Result<Vec<_>>>()?;
    let chain_tol = 1.5 * y_grid.max_step();
    let chain = reports
        .windows(2)
        .map(|w| {
            let (method, miss) = match w[1].concept.psi_oracle(&inst.lower) {
                Some(o) => {
                    let h = y_grid.max_step();
                    ("oracle", w[0].cloud.records.iter().filter(|r| !o(&r.x, &r.y, h)).collect::<Vec<_>>())
                }
                None => ("records", w[0].cloud.missing_from(&w[1].cloud, chain_tol)),
            };
            ChainCheck {
                subset: w[0].concept,
                superset: w[1].concept,
                method,
                checked: w[0].cloud.len(),
                violations: miss.len(),
                first_violation: miss.first().map(|r| (r.x.clone(), r.y.clone())),
            }
        })
        .collect();
    let concepts = reports
        .iter()
        .map(|r| ConceptSummary {
            concept: r.concept,
            feasible_pairs: r.feasible_pairs,
            minimizers: r.efficient.clone(),
            local_minimizers: r.local_minimizers.clone(),
            flagged_missing_limit_point: r.flagged_missing_limit_point,
            caveats: r.caveats.clone(),
        })
        .collect();
    Ok(ComparisonReport { instance: inst.name.clone(), concepts, chain, chain_tol, reports })
}
