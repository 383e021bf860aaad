//! Closedness diagnostics: a candidate is a missing limit point when graph
//! samples accumulate at it while the membership oracle rejects it.

use serde::{Deserialize, Serialize};

use super::cloud::GraphCloud;
use super::{psi_sample_with, Concept};
use crate::error::{Error, Result};
use crate::parametric::{BoxRegion, GridSpec, ParametricMop, SetOracle};
use crate::spatial::dist;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ClosedHere,
    MissingLimitPoint,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosednessVerdict {
    pub candidate: Vec<f64>,
    pub verdict: Verdict,
    /// Nearest sample found at each radius, in schedule order.
    pub witness: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
}

/// Source of graph points `(x, y)` (or `(x, z)`) near a center.
pub trait GraphSampler {
    fn sample_near(&self, center: &[f64], radius: f64) -> Result<Vec<Vec<f64>>>;
}

/// `r0 · 2^{-k}` for `k = 0..=steps`.
pub fn radius_schedule(r0: f64, steps: u32) -> Vec<f64> {
    (0..=steps).map(|k| r0 * 2f64.powi(-(k as i32))).collect()
}

pub fn closedness_probe(
    member: &dyn Fn(&[f64]) -> bool,
    sampler: &dyn GraphSampler,
    candidate: &[f64],
    radii: &[f64],
) -> Result<ClosednessVerdict> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("radius schedule must be positive and strictly decreasing".into()));
    }
    let accepted = member(candidate);
    let mut witness = Vec::new();
    let mut every_radius = true;
    for &r in radii {
        let best = sampler
            .sample_near(candidate, r)?
            .into_iter()
            .filter(|p| p.as_slice() != candidate)
            .map(|p| (dist(&p, candidate), p))
            .filter(|(d, _)| *d <= r)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((_, p)) => witness.push(p),
            None => {
                every_radius = false;
                break;
            }
        }
    }
    let verdict = if accepted {
        Verdict::ClosedHere
    } else if every_radius {
        Verdict::MissingLimitPoint
    } else {
        Verdict::Inconclusive
    };
    Ok(ClosednessVerdict { candidate: candidate.to_vec(), verdict, witness, radii: radii.to_vec() })
}

/// Exact graph membership `(x, p) ↦ p ∈ S(x)` from a set oracle.
pub fn graph_member(oracle: SetOracle, n: usize) -> impl Fn(&[f64]) -> bool {
    move |p: &[f64]| oracle(&p[..n], &p[n..], 0.0)
}

/// Lattice around the center (spacing `r / resolution`), kept where the oracle
/// accepts exactly, or, failing that, within one spacing.
pub struct OracleLatticeSampler {
    oracle: SetOracle,
    n: usize,
    x_box: BoxRegion,
    resolution: usize,
}

impl OracleLatticeSampler {
    pub fn new(oracle: SetOracle, n: usize, x_box: BoxRegion) -> Self {
        OracleLatticeSampler { oracle, n, x_box, resolution: 8 }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(1);
        self
    }
}

/// Offsets `j ∈ [−k, k]^d ∖ {0}`.
fn lattice(d: usize, k: i64) -> Vec<Vec<i64>> {
    let side = 2 * k + 1;
    let total = (side as usize).pow(d as u32);
    (0..total)
        .map(|mut c| {
            (0..d)
                .map(|_| {
                    let v = (c % side as usize) as i64 - k;
                    c /= side as usize;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|j| j.iter().any(|v| *v != 0))
        .collect()
}

impl GraphSampler for OracleLatticeSampler {
    fn sample_near(&self, c: &[f64], r: f64) -> Result<Vec<Vec<f64>>> {
        let h = r / self.resolution as f64;
        let pts: Vec<Vec<f64>> = lattice(c.len(), self.resolution as i64)
            .into_iter()
            .map(|j| c.iter().zip(&j).map(|(ci, ji)| ci + *ji as f64 * h).collect::<Vec<f64>>())
            .filter(|p| dist(p, c) <= r && self.x_box.contains(&p[..self.n], 1e-12))
            .collect();
        let exact: Vec<Vec<f64>> =
            pts.iter().filter(|p| (self.oracle)(&p[..self.n], &p[self.n..], 0.0)).cloned().collect();
        if !exact.is_empty() {
            return Ok(exact);
        }
        Ok(pts.into_iter().filter(|p| (self.oracle)(&p[..self.n], &p[self.n..], h)).collect())
    }
}

/// Whether graph points carry decisions or images after the parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSpace {
    Decision,
    Image,
}

/// Recomputes the mapping near the center: parameters at `±r/2, ±r` and the
/// decision grid augmented by a local lattice of spacing `r/4`.
pub struct GridRefinementSampler<'a> {
    problem: &'a ParametricMop,
    concept: Concept,
    grid: GridSpec,
    space: GraphSpace,
}

impl<'a> GridRefinementSampler<'a> {
    pub fn new(problem: &'a ParametricMop, concept: Concept, grid: GridSpec, space: GraphSpace) -> Self {
        GridRefinementSampler { problem, concept, grid, space }
    }
}

impl GraphSampler for GridRefinementSampler<'_> {
    fn sample_near(&self, c: &[f64], r: f64) -> Result<Vec<Vec<f64>>> {
        let n = self.problem.n;
        let mut xs: Vec<Vec<f64>> = vec![c[..n].to_vec()];
        for j in lattice(n, 2) {
            xs.push(c[..n].iter().zip(&j).map(|(ci, ji)| ci + *ji as f64 * r / 2.0).collect());
        }
        xs.retain(|x| self.problem.x_box.contains(x, 1e-12));
        let extra: Vec<Vec<f64>> = match self.space {
            GraphSpace::Decision => {
                let cy = &c[n..];
                lattice(cy.len(), 4)
                    .into_iter()
                    .map(|j| cy.iter().zip(&j).map(|(ci, ji)| ci + *ji as f64 * r / 4.0).collect())
                    .collect()
            }
            GraphSpace::Image => vec![],
        };
        let mut out = Vec::new();
        for x in xs {
            let s = psi_sample_with(self.problem, &x, &self.grid, self.concept, &extra)?;
            let pts = match self.space {
                GraphSpace::Decision => &s.decisions,
                GraphSpace::Image => &s.images,
            };
            for p in pts.iter() {
                let g: Vec<f64> = x.iter().chain(p).copied().collect();
                if dist(&g, c) <= r {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }
}

/// Records of a precomputed cloud.
pub struct CloudSampler<'a> {
    cloud: &'a GraphCloud,
    concept: Option<Concept>,
    space: GraphSpace,
}

impl<'a> CloudSampler<'a> {
    pub fn new(cloud: &'a GraphCloud, concept: Option<Concept>, space: GraphSpace) -> Self {
        CloudSampler { cloud, concept, space }
    }
}

impl GraphSampler for CloudSampler<'_> {
    fn sample_near(&self, c: &[f64], r: f64) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .cloud
            .records
            .iter()
            .filter(|rec| self.concept.is_none_or(|k| rec.concept == k))
            .map(|rec| {
                let p = match self.space {
                    GraphSpace::Decision => &rec.y,
                    GraphSpace::Image => &rec.z,
                };
                rec.x.iter().chain(p).copied().collect::<Vec<f64>>()
            })
            .filter(|g| dist(g, c) <= r)
            .collect())
    }
}

/// Concatenation of several samplers.
pub struct UnionSampler<'a>(pub Vec<&'a dyn GraphSampler>);

impl GraphSampler for UnionSampler<'_> {
    fn sample_near(&self, c: &[f64], r: f64) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::new();
        for s in &self.0 {
            out.extend(s.sample_near(c, r)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeOptions {
    pub r0: f64,
    pub steps: u32,
    /// Also recompute the mapping on refined grids (slower; decision graphs of eff/weff only).
    pub grid_sampler: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { r0: 0.25, steps: 10, grid_sampler: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    /// `psi_eff`, `phi_weff`, `phi_minus_c`, ...
    pub graph: String,
    pub verdict: ClosednessVerdict,
}

/// Probes the graph of Ψ-type (`Decision`) or Φ-type (`Image`) mapping of `concept`
/// at `(x, p)`; `None` when the problem has no oracle for it.
pub fn probe_mapping(
    problem: &ParametricMop,
    concept: Concept,
    space: GraphSpace,
    x: &[f64],
    p: &[f64],
    grid: Option<&GridSpec>,
    opts: &ProbeOptions,
) -> Result<Option<ClosednessVerdict>> {
    let oracle = match space {
        GraphSpace::Decision => concept.psi_oracle(problem),
        GraphSpace::Image => concept.phi_oracle(problem),
    };
    let Some(oracle) = oracle.cloned() else {
        return Ok(None);
    };
    let cand: Vec<f64> = x.iter().chain(p).copied().collect();
    let lat = OracleLatticeSampler::new(oracle.clone(), problem.n, problem.x_box.clone());
    let radii = radius_schedule(opts.r0, opts.steps);
    let member = graph_member(oracle, problem.n);
    let v = match grid {
        Some(g) if opts.grid_sampler && concept != Concept::Bar && concept != Concept::Sigma => {
            let gs = GridRefinementSampler::new(problem, concept, g.clone(), space);
            closedness_probe(&member, &UnionSampler(vec![&lat, &gs]), &cand, &radii)?
        }
        _ => closedness_probe(&member, &lat, &cand, &radii)?,
    };
    Ok(Some(v))
}

/// Probes every oracle-backed graph at each feasible critical point of each parameter.
pub fn probe_battery(
    problem: &ParametricMop,
    xs: &[Vec<f64>],
    grid: &GridSpec,
    opts: &ProbeOptions,
) -> Result<Vec<ProbeRecord>> {
    let mut out = Vec::new();
    let radii = radius_schedule(opts.r0, opts.steps);
    for x in xs {
        for y in problem.critical_points(x) {
            if !problem.gamma.contains(x, &y) {
                continue;
            }
            let z = problem.objective(x, &y);
            for concept in [Concept::Eff, Concept::Weff, Concept::Bar] {
                for (space, p, tag) in [(GraphSpace::Decision, &y, "psi"), (GraphSpace::Image, &z, "phi")] {
                    if let Some(v) = probe_mapping(problem, concept, space, x, p, Some(grid), opts)? {
                        out.push(ProbeRecord { graph: format!("{tag}_{concept}"), verdict: v });
                    }
                }
            }
            if let Some(o) = problem.oracles.phi_minus_c.clone() {
                let cand: Vec<f64> = x.iter().chain(&z).copied().collect();
                let lat = OracleLatticeSampler::new(o.clone(), problem.n, problem.x_box.clone());
                let v = closedness_probe(&graph_member(o, problem.n), &lat, &cand, &radii)?;
                out.push(ProbeRecord { graph: "phi_minus_c".into(), verdict: v });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_and_lattice() {
        let r = radius_schedule(1.0, 3);
        assert_eq!(r, vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(lattice(2, 1).len(), 8);
    }

    #[test]
    fn rejects_bad_schedule() {
        struct Never;
        impl GraphSampler for Never {
            fn sample_near(&self, _: &[f64], _: f64) -> Result<Vec<Vec<f64>>> {
                Ok(vec![])
            }
        }
        assert!(closedness_probe(&|_| true, &Never, &[0.0], &[0.5, 1.0]).is_err());
        let v = closedness_probe(&|_| false, &Never, &[0.0], &[1.0]).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }
}
