//! Efficiency (Ψ, Ψw, Ψ̄) and frontier (Φ, Φw, Φ̄) mappings sampled on grids,
//! value-function feasibility in all variants, and graph-closedness probes.

mod closure;
mod cloud;
mod probe;
mod vfr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dominance::{efficient_flat, Strength};
use crate::error::{Error, Result};
use crate::parametric::{feasible_sample_with, GridSpec, ParametricMop, Points, SetOracle};

pub use closure::{intermediate_closure, BarSlice, DEFAULT_LEVELS};
pub use cloud::{graph_sample, CloudMeta, GraphCloud, GraphRecord};
pub use probe::{
    closedness_probe, graph_member, probe_battery, probe_mapping, radius_schedule, ClosednessVerdict, CloudSampler,
    GraphSampler, GraphSpace, GridRefinementSampler, OracleLatticeSampler, ProbeOptions, ProbeRecord, UnionSampler,
    Verdict,
};
pub use vfr::{vfr_feasible, VfrEvaluator, VfrVariant};

/// Which mapping a sample belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Concept {
    Eff,
    Weff,
    Bar,
    /// The whole feasible image Σ(x) = f(x, Γ(x)).
    Sigma,
}

impl Concept {
    pub fn as_str(self) -> &'static str {
        match self {
            Concept::Eff => "eff",
            Concept::Weff => "weff",
            Concept::Bar => "bar",
            Concept::Sigma => "sigma",
        }
    }

    pub fn psi_oracle(self, p: &ParametricMop) -> Option<&SetOracle> {
        match self {
            Concept::Eff => p.oracles.psi.as_ref(),
            Concept::Weff => p.oracles.psi_w.as_ref(),
            Concept::Bar => p.oracles.psi_bar.as_ref(),
            Concept::Sigma => None,
        }
    }

    pub fn phi_oracle(self, p: &ParametricMop) -> Option<&SetOracle> {
        match self {
            Concept::Eff => p.oracles.phi.as_ref(),
            Concept::Weff => p.oracles.phi_w.as_ref(),
            Concept::Bar => p.oracles.phi_bar.as_ref(),
            Concept::Sigma => None,
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Concept {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eff" => Ok(Concept::Eff),
            "weff" => Ok(Concept::Weff),
            "bar" => Ok(Concept::Bar),
            "sigma" => Ok(Concept::Sigma),
            _ => Err(Error::Invalid(format!("unknown concept `{s}` (eff, weff, bar, sigma)"))),
        }
    }
}

/// How grid output relates to a truncation box that cuts Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Γ is sampled without cutting.
    None,
    /// Grid output was filtered through the analytic oracle.
    OracleConfirmed,
    /// No oracle: the output may contain points that are efficient only because of the box.
    UnconfirmedOnTruncatedBox,
}

/// Decision and image samples of one mapping at one parameter.
#[derive(Clone, Debug)]
pub struct PsiSample {
    pub x: Vec<f64>,
    pub concept: Concept,
    pub decisions: Points,
    pub images: Points,
    /// Number of feasible grid points.
    pub feasible: usize,
    pub truncation: Truncation,
    /// Grid output rejected by the oracle as truncation artifacts.
    pub artifacts: Points,
}

impl PsiSample {
    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }
}

/// Feasible points together with their images (row-major, `q` columns).
pub(crate) struct Evaluated {
    pub ys: Points,
    pub zs: Vec<f64>,
}

pub(crate) fn evaluate(problem: &ParametricMop, x: &[f64], grid: &GridSpec, extra: &[Vec<f64>]) -> Result<Evaluated> {
    let ys = feasible_sample_with(problem, x, grid, extra)?;
    let q = problem.q;
    let mut zs = vec![0.0; ys.len() * q];
    for (i, y) in ys.iter().enumerate() {
        problem.f.eval_into(x, y, &mut zs[i * q..(i + 1) * q]);
    }
    Ok(Evaluated { ys, zs })
}

pub(crate) fn front(problem: &ParametricMop, zs: &[f64], concept: Concept) -> Vec<usize> {
    let mode = match concept {
        Concept::Weff => Strength::Weak,
        _ => Strength::Strong,
    };
    efficient_flat(zs, problem.q, &problem.cone, problem.dominance_tol, mode)
}

fn gather(ev: &Evaluated, idx: &[usize], m: usize, q: usize) -> (Points, Points) {
    let mut ys = Points::new(m);
    let mut zs = Points::new(q);
    for &i in idx {
        ys.push(ev.ys.get(i));
        zs.push(&ev.zs[i * q..(i + 1) * q]);
    }
    (ys, zs)
}

/// Drops grid output the analytic oracle places farther than one grid step
/// from the true set when a truncation box cuts Γ.
pub(crate) fn confirm(
    problem: &ParametricMop,
    concept: Concept,
    x: &[f64],
    tol: f64,
    idx: Vec<usize>,
    ys: &Points,
) -> (Vec<usize>, Vec<usize>, Truncation) {
    if concept == Concept::Sigma || problem.gamma.cutting_box().is_none() {
        return (idx, vec![], Truncation::None);
    }
    match concept.psi_oracle(problem) {
        Some(oracle) => {
            let (keep, drop): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| oracle(x, ys.get(i), tol));
            (keep, drop, Truncation::OracleConfirmed)
        }
        None => (idx, vec![], Truncation::UnconfirmedOnTruncatedBox),
    }
}

/// Efficient (`Eff`), weakly efficient (`Weff`), intermediate (`Bar`) or all
/// feasible (`Sigma`) grid points of Γ(x).
pub fn psi_sample(problem: &ParametricMop, x: &[f64], grid: &GridSpec, concept: Concept) -> Result<PsiSample> {
    psi_sample_with(problem, x, grid, concept, &[])
}

/// [`psi_sample`] on the grid augmented by `extra` decision points.
pub fn psi_sample_with(
    problem: &ParametricMop,
    x: &[f64],
    grid: &GridSpec,
    concept: Concept,
    extra: &[Vec<f64>],
) -> Result<PsiSample> {
    if concept == Concept::Bar {
        return closure::bar_slice(problem, x, grid, DEFAULT_LEVELS, extra).map(BarSlice::into_sample);
    }
    let ev = evaluate(problem, x, grid, extra)?;
    let idx = match concept {
        Concept::Sigma => (0..ev.ys.len()).collect(),
        c => front(problem, &ev.zs, c),
    };
    let (keep, drop, truncation) = confirm(problem, concept, x, grid.max_step(), idx, &ev.ys);
    let (decisions, images) = gather(&ev, &keep, problem.m, problem.q);
    let (artifacts, _) = gather(&ev, &drop, problem.m, problem.q);
    Ok(PsiSample { x: x.to_vec(), concept, decisions, images, feasible: ev.ys.len(), truncation, artifacts })
}

/// Image points of [`psi_sample`], sorted and deduplicated.
pub fn phi_sample(problem: &ParametricMop, x: &[f64], grid: &GridSpec, concept: Concept) -> Result<Points> {
    let mut z = psi_sample(problem, x, grid, concept)?.images;
    z.sort_dedup();
    Ok(z)
}
