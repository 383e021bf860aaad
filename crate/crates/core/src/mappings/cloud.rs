//! Graph samples with per-record provenance and their exports.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{psi_sample, Concept, Truncation};
use crate::error::Result;
use crate::parametric::{GridSpec, ParametricMop};
use crate::spatial::SpatialHash;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub concept: Concept,
}

#[derive(Clone, Debug, Serialize)]
pub struct CloudMeta {
    pub problem: String,
    pub x_grid: GridSpec,
    pub y_grid: GridSpec,
    /// Refinement levels (1 for plain samples).
    pub levels: u32,
    pub truncation: Truncation,
    /// Parameters with an empty sample.
    pub empty_at: Vec<Vec<f64>>,
    /// Grid points removed as truncation artifacts.
    pub artifacts: usize,
}

impl CloudMeta {
    pub fn new(problem: &ParametricMop, x_grid: &GridSpec, y_grid: &GridSpec, levels: u32) -> Self {
        CloudMeta {
            problem: problem.name.clone(),
            x_grid: x_grid.clone(),
            y_grid: y_grid.clone(),
            levels,
            truncation: Truncation::None,
            empty_at: vec![],
            artifacts: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GraphCloud {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub records: Vec<GraphRecord>,
    pub meta: CloudMeta,
}

impl GraphCloud {
    pub fn empty(problem: &ParametricMop, meta: CloudMeta) -> Self {
        GraphCloud { n: problem.n, m: problem.m, q: problem.q, records: vec![], meta }
    }

    pub(crate) fn absorb(
        &mut self,
        recs: impl Iterator<Item = GraphRecord>,
        x: &[f64],
        truncation: Truncation,
        artifacts: usize,
    ) {
        let before = self.records.len();
        self.records.extend(recs);
        if self.records.len() == before {
            self.meta.empty_at.push(x.to_vec());
        }
        self.meta.truncation = self.meta.truncation.max(truncation);
        self.meta.artifacts += artifacts;
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn of_concept(&self, c: Concept) -> impl Iterator<Item = &GraphRecord> {
        self.records.iter().filter(move |r| r.concept == c)
    }

    /// Records at parameter `x` (exact match).
    pub fn slice(&self, x: &[f64]) -> Vec<&GraphRecord> {
        self.records.iter().filter(|r| r.x == x).collect()
    }

    /// Distinct parameters in record order.
    pub fn xs(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.x) && !out.contains(&r.x) {
                out.push(r.x.clone());
            }
        }
        out
    }

    /// Whether some record at the same parameter has decision within `tol` of `y`.
    pub fn contains_pair(&self, x: &[f64], y: &[f64], tol: f64) -> bool {
        self.records.iter().any(|r| r.x == x && crate::spatial::dist(&r.y, y) <= tol)
    }

    /// Records of `self` with no record of `other` at the same parameter within `tol` in decision space.
    pub fn missing_from<'a>(&'a self, other: &GraphCloud, tol: f64) -> Vec<&'a GraphRecord> {
        let mut by_x: BTreeMap<Vec<u64>, Vec<f64>> = BTreeMap::new();
        for r in &other.records {
            by_x.entry(bits(&r.x)).or_default().extend_from_slice(&r.y);
        }
        let hashes: BTreeMap<&Vec<u64>, SpatialHash> =
            by_x.iter().map(|(k, v)| (k, SpatialHash::new(v, self.m, tol))).collect();
        self.records.iter().filter(|r| !hashes.get(&bits(&r.x)).is_some_and(|h| h.any_within(&r.y, tol))).collect()
    }

    /// CSV with columns `x1..xn, y1..ym, z1..zq, concept`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = Vec::new();
        header.extend((1..=self.n).map(|i| format!("x{i}")));
        header.extend((1..=self.m).map(|i| format!("y{i}")));
        header.extend((1..=self.q).map(|i| format!("z{i}")));
        header.push("concept".into());
        wr.write_record(&header)?;
        for r in &self.records {
            let mut row: Vec<String> = r.x.iter().chain(&r.y).chain(&r.z).map(|v| fmt_f(*v)).collect();
            row.push(r.concept.to_string());
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Plot data: the image columns of the records at `x` for concept `c`, space separated.
    pub fn write_slice<W: Write>(&self, mut w: W, x: &[f64], c: Concept) -> Result<()> {
        for r in self.records.iter().filter(|r| r.x == x && r.concept == c) {
            let line: Vec<String> = r.z.iter().map(|v| fmt_f(*v)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn report(&self) -> Value {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.concept.as_str()).or_default() += 1;
        }
        json!({
            "meta": self.meta,
            "dims": {"n": self.n, "m": self.m, "q": self.q},
            "records": self.records.len(),
            "by_concept": counts,
            "parameters": self.xs().len(),
        })
    }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Shortest round-trip representation, stable across runs.
pub(crate) fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

/// Union over the parameter grid of tagged [`psi_sample`] records.
pub fn graph_sample(
    problem: &ParametricMop,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
    concept: Concept,
) -> Result<GraphCloud> {
    let levels = if concept == Concept::Bar { super::DEFAULT_LEVELS } else { 1 };
    let mut cloud = GraphCloud::empty(problem, CloudMeta::new(problem, x_grid, y_grid, levels));
    for x in x_grid.points()?.iter() {
        let s = psi_sample(problem, x, y_grid, concept)?;
        let recs = s.decisions.iter().zip(s.images.iter()).map(|(y, z)| GraphRecord {
            x: x.to_vec(),
            y: y.to_vec(),
            z: z.to_vec(),
            concept,
        });
        cloud.absorb(recs, x, s.truncation, s.artifacts.len());
    }
    Ok(cloud)
}
