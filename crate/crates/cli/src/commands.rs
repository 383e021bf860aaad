use std::collections::BTreeMap;

use anyhow::{Context, Result};
use serde::Serialize;
use vfrlab::bilevel::{compare_concepts_with, solve_with, PairRecord, SolveReport};
use vfrlab::mappings::{probe_battery, psi_sample, Truncation};
use vfrlab::parametric::{load_problem_spec, CATALOG_IDS};
use vfrlab::rational::{fmt_q, unwrap_vec, QVec};
use vfrlab::scalarize::{weak_efficiency_via_scalarization, Reach};
use vfrlab::varanal::{
    estimate_check, golden_check, limiting_normal_cone_union, local_models, oracle_containment, EstimateReport,
    OracleCheck, MODEL_IDS,
};
use vfrlab::{catalog_get, CatalogEntry, Concept, Error, Estimate, GridSpec, Q};

use crate::config::{RunConfig, Subcommand};
use crate::output::{axis_names, fmt_f, Artifacts};

/// A configuration problem detected after parsing; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    subcommand: Subcommand,
    problem: &'a str,
    passed: bool,
    config: &'a RunConfig,
    result: T,
}

struct Setup {
    label: String,
    entry: CatalogEntry,
    x_grid: GridSpec,
    y_grid: GridSpec,
}

impl Setup {
    fn params(&self, cfg: &RunConfig) -> Result<Vec<Vec<f64>>> {
        let xs = match &cfg.params {
            Some(p) => p.clone(),
            None => self.x_grid.points()?.to_vecs(),
        };
        for x in &xs {
            self.entry.problem.check_x(x).map_err(|e| usage(format!("parameter {x:?}: {e}")))?;
        }
        Ok(xs)
    }
}

fn restep(g: &GridSpec, h: f64) -> Result<GridSpec> {
    let step = g.lower.iter().zip(&g.upper).zip(&g.step).map(|((l, u), s)| if l == u { *s } else { h }).collect();
    Ok(GridSpec::new(g.lower.clone(), g.upper.clone(), step)?.with_probes(g.probes.clone())?)
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let (label, mut entry) = match (&cfg.catalog, &cfg.spec) {
        (Some(id), _) => {
            let e = catalog_get(id)
                .map_err(|_| usage(format!("unknown catalog id `{id}` (valid: {})", CATALOG_IDS.join(", "))))?;
            (id.clone(), e)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let e = load_problem_spec(&text).map_err(|e| usage(format!("problem spec {}: {e}", path.display())))?;
            (e.problem.name.clone(), e)
        }
        (None, None) => return Err(usage("no problem source")),
    };
    if let Some(t) = cfg.tolerances.dominance {
        entry.problem.dominance_tol = t;
    }
    if let (Some(t), Some(inst)) = (cfg.tolerances.upper, entry.instance.as_mut()) {
        inst.upper_tol = t;
    }
    let mut x_grid = cfg.x_grid.clone().unwrap_or_else(|| entry.x_grid.clone());
    let mut y_grid = match &cfg.y_grid {
        Some(g) => g.clone(),
        None => entry.problem.y_grid()?,
    };
    if let Some(h) = cfg.step {
        x_grid = restep(&x_grid, h).map_err(|e| usage(format!("step {h}: {e}")))?;
        y_grid = restep(&y_grid, h).map_err(|e| usage(format!("step {h}: {e}")))?;
    }
    if x_grid.dim() != entry.problem.n || y_grid.dim() != entry.problem.m {
        return Err(usage(format!(
            "grid dimensions ({}, {}) do not match the problem ({}, {})",
            x_grid.dim(),
            y_grid.dim(),
            entry.problem.n,
            entry.problem.m
        )));
    }
    Ok(Setup { label, entry, x_grid, y_grid })
}

fn concepts(cfg: &RunConfig, default: &[Concept], all: &[Concept]) -> Result<Vec<Concept>> {
    match cfg.concept.as_deref() {
        None => Ok(default.to_vec()),
        Some("all") => Ok(all.to_vec()),
        Some(s) => Ok(vec![s.parse().map_err(|e: Error| usage(e.to_string()))?]),
    }
}

/// Runs the configured subcommand; `Ok(false)` when a verification failed.
pub fn run(cfg: &RunConfig) -> Result<bool> {
    cfg.validate().map_err(usage)?;
    let sub = cfg.subcommand.expect("validated");
    let mut out = Artifacts::new(cfg.out_dir())?;
    let passed = match sub {
        Subcommand::Solve => solve(cfg, &mut out)?,
        Subcommand::Frontier => frontier(cfg, &mut out)?,
        Subcommand::DiagnoseClosedness => diagnose(cfg, &mut out)?,
        Subcommand::ScalarizeCompare => scalarize(cfg, &mut out)?,
        Subcommand::NormalCone => normal_cone(cfg, &mut out)?,
        Subcommand::CoderivativeCheck => coderivative(cfg, &mut out)?,
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    println!("{sub}: {}", if passed { "passed" } else { "FAILED" });
    Ok(passed)
}

fn report<T: Serialize>(out: &mut Artifacts, cfg: &RunConfig, label: &str, passed: bool, result: T) -> Result<()> {
    let sub = cfg.subcommand.expect("validated");
    out.json("report.json", &Report { subcommand: sub, problem: label, passed, config: cfg, result })
}

fn describe_pair(p: &PairRecord) -> String {
    format!("x = {:?}, y = {:?}, F = {:?}", p.x, p.y, p.value)
}

fn pairs_csv(out: &mut Artifacts, name: &str, r: &SolveReport) -> Result<()> {
    out.write_with(name, |w| Ok(r.write_csv(w)?))
}

fn summarize(r: &SolveReport) {
    match r.minimizer() {
        Some(m) => {
            let flag = if r.flagged_missing_limit_point { " [next to a missing limit point]" } else { "" };
            println!("{}: minimizer {}{flag}", r.concept, describe_pair(m));
        }
        None => println!("{}: no minimizer ({})", r.concept, r.reason.as_deref().unwrap_or("empty")),
    }
}

fn solve(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let s = setup(cfg)?;
    let inst = s.entry.instance.as_ref().ok_or_else(|| usage(format!("`{}` has no upper-level instance", s.label)))?;
    let all = [Concept::Eff, Concept::Bar, Concept::Weff];
    let cs = concepts(cfg, &all, &all)?;
    if cs.len() > 1 {
        let c = compare_concepts_with(inst, &s.x_grid, &s.y_grid, &cfg.solve)?;
        for r in &c.reports {
            summarize(r);
            pairs_csv(out, &format!("pairs_{}.csv", r.concept), r)?;
        }
        let passed = c.chain.iter().all(|ch| ch.violations == 0);
        for ch in c.chain.iter().filter(|ch| ch.violations > 0) {
            println!("inclusion {} ⊆ {} violated at {} of {} pairs", ch.subset, ch.superset, ch.violations, ch.checked);
        }
        report(out, cfg, &s.label, passed, &c)?;
        Ok(passed)
    } else {
        let r = solve_with(inst, cs[0], &s.x_grid, &s.y_grid, &cfg.solve)?;
        summarize(&r);
        pairs_csv(out, "pairs.csv", &r)?;
        report(out, cfg, &s.label, true, &r)?;
        Ok(true)
    }
}

#[derive(Serialize)]
struct SliceSummary {
    x: Vec<f64>,
    concept: Concept,
    points: usize,
    feasible: usize,
    truncation: Truncation,
    artifacts: usize,
}

#[derive(Serialize)]
struct InclusionSummary {
    x: Vec<f64>,
    subset: Concept,
    superset: Concept,
    holds: bool,
    missing: usize,
}

#[derive(Serialize)]
struct FrontierResult {
    slices: Vec<SliceSummary>,
    inclusions: Vec<InclusionSummary>,
}

fn frontier(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let s = setup(cfg)?;
    let p = &s.entry.problem;
    let cs = concepts(cfg, &[Concept::Eff, Concept::Weff], &[Concept::Eff, Concept::Weff, Concept::Bar])?;
    let xs = s.params(cfg)?;
    let mut slices = Vec::new();
    let mut decisions: BTreeMap<Concept, Vec<Vec<Vec<f64>>>> = BTreeMap::new();
    for &c in &cs {
        let header: Vec<String> =
            axis_names("x", p.n).chain(axis_names("y", p.m)).chain(axis_names("f", p.q)).collect();
        let (mut rows, mut plot) = (Vec::new(), Vec::new());
        for x in &xs {
            let ps = psi_sample(p, x, &s.y_grid, c)?;
            for (y, z) in ps.decisions.iter().zip(ps.images.iter()) {
                rows.push(fmt_f(x).chain(fmt_f(y)).chain(fmt_f(z)).collect());
            }
            let mut images = ps.images.clone();
            images.sort_dedup();
            for z in images.iter() {
                plot.push(if xs.len() == 1 { z.to_vec() } else { x.iter().chain(z).copied().collect() });
            }
            decisions.entry(c).or_default().push(ps.decisions.to_vecs());
            slices.push(SliceSummary {
                x: x.clone(),
                concept: c,
                points: ps.len(),
                feasible: ps.feasible,
                truncation: ps.truncation,
                artifacts: ps.artifacts.len(),
            });
        }
        out.csv(&format!("psi_{c}.csv"), &header, &rows)?;
        out.columns(&format!("phi_{c}.dat"), &plot)?;
    }
    let mut inclusions = Vec::new();
    if let (Some(eff), Some(weff)) = (decisions.get(&Concept::Eff), decisions.get(&Concept::Weff)) {
        for ((x, a), b) in xs.iter().zip(eff).zip(weff) {
            let missing = a.iter().filter(|y| !b.contains(y)).count();
            inclusions.push(InclusionSummary {
                x: x.clone(),
                subset: Concept::Eff,
                superset: Concept::Weff,
                holds: missing == 0,
                missing,
            });
        }
    }
    for sl in &slices {
        println!("{} at x = {:?}: {} of {} feasible grid points", sl.concept, sl.x, sl.points, sl.feasible);
    }
    let passed = inclusions.iter().all(|i| i.holds);
    report(out, cfg, &s.label, passed, FrontierResult { slices, inclusions })?;
    Ok(passed)
}

#[derive(Serialize)]
struct DiagnoseResult {
    /// Verdict counts per probed graph.
    summary: BTreeMap<String, BTreeMap<String, usize>>,
    probes: Vec<vfrlab::mappings::ProbeRecord>,
}

fn verdict_name(v: vfrlab::Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|s| s.as_str().map(String::from)).unwrap_or_default()
}

fn diagnose(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let s = setup(cfg)?;
    let xs = s.params(cfg)?;
    let probes = probe_battery(&s.entry.problem, &xs, &s.y_grid, &cfg.solve.probe)?;
    let mut summary: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let width = probes.iter().map(|p| p.verdict.candidate.len()).max().unwrap_or(0);
    let header: Vec<String> =
        ["graph", "verdict", "nearest"].into_iter().map(String::from).chain(axis_names("c", width)).collect();
    let mut rows = Vec::new();
    for p in &probes {
        let v = verdict_name(p.verdict.verdict);
        *summary.entry(p.graph.clone()).or_default().entry(v.clone()).or_default() += 1;
        let nearest = p
            .verdict
            .witness
            .last()
            .map(|w| w.iter().zip(&p.verdict.candidate).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
        let mut row = vec![p.graph.clone(), v, nearest.map(|d| format!("{d:?}")).unwrap_or_default()];
        row.extend(fmt_f(&p.verdict.candidate));
        row.resize(header.len(), String::new());
        rows.push(row);
    }
    if probes.is_empty() {
        println!("no oracle-backed critical points to probe");
    }
    for (g, counts) in &summary {
        let parts: Vec<String> = counts.iter().map(|(v, n)| format!("{n} {v}")).collect();
        println!("{g}: {}", parts.join(", "));
    }
    out.csv("probes.csv", &header, &rows)?;
    report(out, cfg, &s.label, true, DiagnoseResult { summary, probes })?;
    Ok(true)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
}

fn directed(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

#[derive(Serialize)]
struct ScalarizeSlice {
    x: Vec<f64>,
    union_points: usize,
    weakly_efficient_points: usize,
    weights: usize,
    critical_weights: usize,
    reach: Reach,
    /// Union points that are not weakly efficient on the grid.
    outside_weff: usize,
    hausdorff: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn scalarize(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let s = setup(cfg)?;
    let p = &s.entry.problem;
    let xs = s.params(cfg)?;
    let tol = s.y_grid.max_step();
    let header: Vec<String> =
        axis_names("x", p.n).chain(axis_names("y", p.m)).chain(["in_union".into(), "in_weff".into()]).collect();
    let (mut rows, mut slices) = (Vec::new(), Vec::new());
    for x in &xs {
        let u = weak_efficiency_via_scalarization(p, x, cfg.resolution, &s.y_grid)?;
        let w = psi_sample(p, x, &s.y_grid, Concept::Weff)?;
        let (uv, wv) = (u.decisions.to_vecs(), w.decisions.to_vecs());
        let outside_weff = uv.iter().filter(|y| !wv.contains(y)).count();
        let hausdorff = directed(&uv, &wv).max(directed(&wv, &uv));
        // scalarized minimizers are always weakly efficient; the converse needs convexity
        let passed = outside_weff == 0 && (u.reach != Reach::Equivalent || hausdorff <= tol);
        let mut all = uv.clone();
        all.extend(wv.iter().filter(|y| !uv.contains(y)).cloned());
        all.sort_by(|a, b| vfrlab::parametric::grid::lex_cmp(a, b));
        for y in &all {
            let flags = [uv.contains(y), wv.contains(y)].map(|b| u8::from(b).to_string());
            rows.push(fmt_f(x).chain(fmt_f(y)).chain(flags).collect());
        }
        println!(
            "x = {x:?}: union {} / weff {} points, Hausdorff {hausdorff:.3e}{}",
            uv.len(),
            wv.len(),
            if passed { "" } else { " FAILED" }
        );
        slices.push(ScalarizeSlice {
            x: x.clone(),
            union_points: uv.len(),
            weakly_efficient_points: wv.len(),
            weights: u.weights.len(),
            critical_weights: u.critical_weights,
            reach: u.reach,
            outside_weff,
            hausdorff,
            passed,
            warning: u.warning,
        });
    }
    out.csv("scalarize.csv", &header, &rows)?;
    let passed = slices.iter().all(|s| s.passed);
    report(out, cfg, &s.label, passed, &slices)?;
    Ok(passed)
}

fn model_id(cfg: &RunConfig) -> Result<&str> {
    match cfg.catalog.as_deref() {
        Some(id) if MODEL_IDS.contains(&id) => Ok(id),
        _ => Err(usage(format!("this subcommand needs `catalog` set to one of {}", MODEL_IDS.join(", ")))),
    }
}

#[derive(Serialize)]
struct NormalConeResult {
    golden: vfrlab::varanal::GoldenReport,
    oracle: Vec<OracleCheck>,
}

fn normal_cone(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let id = model_id(cfg)?;
    let golden = golden_check(id)?;
    let m = local_models(id)?;
    let mut oracle = Vec::new();
    let mut rows = Vec::new();
    for (name, u, at) in m.labeled_sets() {
        let cone = limiting_normal_cone_union(u, &at)?;
        for (k, piece) in cone.pieces().iter().enumerate() {
            for g in piece.generators() {
                rows.push(vec![name.clone(), k.to_string(), join_q(&g)]);
            }
        }
        let mut check = oracle_containment(u, &at, &cone, cfg.oracle_samples, cfg.oracle_radius, cfg.seed)?;
        check.label = name;
        println!(
            "{}: oracle angle {:.1e}, generator gap {:.1e}{}",
            check.label,
            check.max_outside_angle,
            check.max_generator_gap,
            if check.passed { "" } else { " FAILED" }
        );
        oracle.push(check);
    }
    for c in &golden.cones {
        println!("golden {}: {}", c.graph, if c.matches { "match" } else { "MISMATCH" });
    }
    let header = ["set", "piece", "generator"].map(String::from);
    out.csv("normal_cones.csv", &header, &rows)?;
    let passed = golden.passed && oracle.iter().all(|c| c.passed);
    report(out, cfg, id, passed, NormalConeResult { golden, oracle })?;
    Ok(passed)
}

fn join_q(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
enum EstimateStatus {
    Holds,
    /// The inclusion is not valid in general, and a counterexample was found.
    RefutedAsExpected,
    /// Fails at a dual vector where the estimate's hypothesis is not met.
    FailsOutsideHypothesis,
    Violated,
}

impl EstimateStatus {
    fn of(r: &EstimateReport) -> Self {
        if r.holds {
            EstimateStatus::Holds
        } else if r.estimate == Estimate::FrontierViaSigma {
            EstimateStatus::RefutedAsExpected
        } else if !r.hypothesis_met {
            EstimateStatus::FailsOutsideHypothesis
        } else {
            EstimateStatus::Violated
        }
    }

    fn text(self) -> &'static str {
        match self {
            EstimateStatus::Holds => "holds",
            EstimateStatus::RefutedAsExpected => "refuted as expected",
            EstimateStatus::FailsOutsideHypothesis => "fails outside hypothesis",
            EstimateStatus::Violated => "VIOLATED",
        }
    }
}

#[derive(Serialize)]
struct CheckedEstimate {
    status: EstimateStatus,
    #[serde(flatten)]
    report: EstimateReport,
}

#[derive(Serialize)]
struct CoderivativeResult {
    golden: vfrlab::varanal::GoldenReport,
    /// Status counts per estimate.
    summary: BTreeMap<String, BTreeMap<EstimateStatus, usize>>,
    checks: Vec<CheckedEstimate>,
}

fn default_z_stars(q: usize) -> Vec<QVec> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..q {
        out = out.into_iter().flat_map(|v| (-2..=2).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out.iter().map(|v| vfrlab::rational::qv(v)).collect()
}

fn coderivative(cfg: &RunConfig, out: &mut Artifacts) -> Result<bool> {
    let id = model_id(cfg)?;
    let golden = golden_check(id)?;
    let m = local_models(id)?;
    let zs = match &cfg.z_star {
        Some(z) => z.iter().map(|v| unwrap_vec(v)).collect(),
        None => default_z_stars(m.q),
    };
    let mut checks = Vec::new();
    for e in Estimate::ALL {
        for z in &zs {
            let r = match estimate_check(id, None, z, e) {
                Ok(r) => r,
                // the models of this example do not cover every estimate
                Err(Error::NoModels(_)) => break,
                Err(Error::Dimension { .. }) => {
                    return Err(usage(format!("z* {} must have {} entries", join_q(z), m.q)))
                }
                Err(err) => return Err(err.into()),
            };
            checks.push(CheckedEstimate { status: EstimateStatus::of(&r), report: r });
        }
    }
    let mut summary: BTreeMap<String, BTreeMap<EstimateStatus, usize>> = BTreeMap::new();
    let mut rows = Vec::new();
    for c in &checks {
        *summary.entry(c.report.estimate.to_string()).or_default().entry(c.status).or_default() += 1;
        let z = join_q(&unwrap_vec(&c.report.z_star));
        if c.status != EstimateStatus::Holds {
            println!(
                "{} at z* = ({z}): {} ({} vs {})",
                c.report.estimate,
                c.status.text(),
                c.report.lhs_text,
                c.report.rhs_text
            );
        }
        rows.push(vec![
            c.report.estimate.to_string(),
            z,
            c.report.lhs_text.clone(),
            c.report.rhs_text.clone(),
            c.report.holds.to_string(),
            c.status.text().to_string(),
        ]);
    }
    for (e, counts) in &summary {
        let parts: Vec<String> = counts.iter().map(|(s, n)| format!("{n} {}", s.text())).collect();
        println!("{e}: {}", parts.join(", "));
    }
    println!("golden comparison: {}", if golden.passed { "match" } else { "MISMATCH" });
    let header = ["estimate", "z_star", "lhs", "rhs", "holds", "status"].map(String::from);
    out.csv("estimates.csv", &header, &rows)?;
    let passed = golden.passed && checks.iter().all(|c| c.status != EstimateStatus::Violated);
    report(out, cfg, id, passed, CoderivativeResult { golden, summary, checks })?;
    Ok(passed)
}
