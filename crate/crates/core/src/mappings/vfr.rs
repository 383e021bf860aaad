//! Value-function reformulation feasibility: `f(x,y) ∈ Φ̂(x)` or `f(x,y) ∈ Φ̂(x) − C`.

use std::cell::OnceCell;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::closure::{bar_slice, BarSlice, DEFAULT_LEVELS};
use super::{psi_sample_with, Concept};
use crate::error::{Error, Result};
use crate::parametric::{feasible_sample_with, GridSpec, ParametricMop, Points};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VfrVariant {
    E,
    Ew,
    Ebar,
    #[serde(rename = "E_minusC")]
    EMinusC,
    #[serde(rename = "Ew_minusC")]
    EwMinusC,
    #[serde(rename = "Ebar_minusC")]
    EbarMinusC,
}

impl VfrVariant {
    pub const ALL: [VfrVariant; 6] = [
        VfrVariant::E,
        VfrVariant::Ew,
        VfrVariant::Ebar,
        VfrVariant::EMinusC,
        VfrVariant::EwMinusC,
        VfrVariant::EbarMinusC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VfrVariant::E => "E",
            VfrVariant::Ew => "Ew",
            VfrVariant::Ebar => "Ebar",
            VfrVariant::EMinusC => "E_minusC",
            VfrVariant::EwMinusC => "Ew_minusC",
            VfrVariant::EbarMinusC => "Ebar_minusC",
        }
    }

    pub fn concept(self) -> Concept {
        match self {
            VfrVariant::E | VfrVariant::EMinusC => Concept::Eff,
            VfrVariant::Ew | VfrVariant::EwMinusC => Concept::Weff,
            VfrVariant::Ebar | VfrVariant::EbarMinusC => Concept::Bar,
        }
    }

    pub fn minus_cone(self) -> bool {
        matches!(self, VfrVariant::EMinusC | VfrVariant::EwMinusC | VfrVariant::EbarMinusC)
    }
}

impl fmt::Display for VfrVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VfrVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VfrVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown variant `{s}`")))
    }
}

fn key(y: &[f64]) -> Vec<u64> {
    y.iter().map(|v| v.to_bits()).collect()
}

/// Frontier samples at one parameter, reused across many decision queries.
///
/// Image matching for `E`/`Ew` is exact by default (grid images are reproduced
/// bit for bit); the `Φ̄` variants match within the pull-back tolerance `ε(L)`.
pub struct VfrEvaluator<'a> {
    problem: &'a ParametricMop,
    x: Vec<f64>,
    grid: GridSpec,
    extra: Vec<Vec<f64>>,
    sample: HashSet<Vec<u64>>,
    decisions: Points,
    eff: Points,
    weff: Points,
    bar: OnceCell<BarSlice>,
    tol: Option<f64>,
}

impl<'a> VfrEvaluator<'a> {
    pub fn new(problem: &'a ParametricMop, x: &[f64], grid: &GridSpec) -> Result<Self> {
        Self::with_extra(problem, x, grid, &[])
    }

    pub fn with_extra(problem: &'a ParametricMop, x: &[f64], grid: &GridSpec, extra: &[Vec<f64>]) -> Result<Self> {
        let decisions = feasible_sample_with(problem, x, grid, extra)?;
        let sample = decisions.iter().map(key).collect();
        let eff = psi_sample_with(problem, x, grid, Concept::Eff, extra)?.images;
        let weff = psi_sample_with(problem, x, grid, Concept::Weff, extra)?.images;
        Ok(VfrEvaluator {
            problem,
            x: x.to_vec(),
            grid: grid.clone(),
            extra: extra.to_vec(),
            sample,
            decisions,
            eff,
            weff,
            bar: OnceCell::new(),
            tol: None,
        })
    }

    /// Overrides the image-matching tolerance for every variant.
    pub fn with_tolerance(mut self, tol: Option<f64>) -> Self {
        self.tol = tol;
        self
    }

    /// Feasible sample points at which [`check`](Self::check) may be queried.
    pub fn decisions(&self) -> &Points {
        &self.decisions
    }

    fn bar(&self) -> Result<&BarSlice> {
        if let Some(b) = self.bar.get() {
            return Ok(b);
        }
        let b = bar_slice(self.problem, &self.x, &self.grid, DEFAULT_LEVELS, &self.extra)?;
        Ok(self.bar.get_or_init(|| b))
    }

    pub fn check(&self, y: &[f64], variant: VfrVariant) -> Result<bool> {
        self.problem.check_y(&self.x, y)?;
        if !self.sample.contains(&key(y)) {
            return Err(Error::Invalid(format!("y = {y:?} is not a point of the evaluator sample")));
        }
        let f = self.problem.objective(&self.x, y);
        let (set, tol) = match variant.concept() {
            Concept::Eff => (&self.eff, self.tol.unwrap_or(0.0)),
            Concept::Weff => (&self.weff, self.tol.unwrap_or(0.0)),
            _ => {
                let b = self.bar()?;
                (&b.frontier, self.tol.unwrap_or(b.eps))
            }
        };
        Ok(if variant.minus_cone() { self.below(set, &f, tol) } else { near(set, &f, tol) })
    }

    /// `f ∈ set − C`: some `z` with `⟨g, z − f⟩ ≥ −τ − tol·|g|` for every dual generator `g`.
    fn below(&self, set: &Points, f: &[f64], tol: f64) -> bool {
        let cone = &self.problem.cone;
        let tau = self.problem.dominance_tol;
        let tf = cone.transform(f);
        let slack: Vec<f64> =
            cone.dual_f().iter().map(|g| tau + tol * g.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        let mut tz = vec![0.0; tf.len()];
        set.iter().any(|z| {
            cone.transform_into(z, &mut tz);
            tz.iter().zip(&tf).zip(&slack).all(|((a, b), s)| b <= &(a + s))
        })
    }
}

fn near(set: &Points, f: &[f64], tol: f64) -> bool {
    if tol == 0.0 {
        set.iter().any(|z| z == f)
    } else {
        set.iter().any(|z| crate::spatial::dist(z, f) <= tol)
    }
}

/// Feasibility of `(x, y)` for the value-function reformulation `variant`,
/// evaluated on `grid` augmented by `y`.
pub fn vfr_feasible(
    problem: &ParametricMop,
    x: &[f64],
    y: &[f64],
    variant: VfrVariant,
    grid: &GridSpec,
    tol: Option<f64>,
) -> Result<bool> {
    problem.check_x(x)?;
    problem.check_y(x, y)?;
    VfrEvaluator::with_extra(problem, x, grid, &[y.to_vec()])?.with_tolerance(tol).check(y, variant)
}
