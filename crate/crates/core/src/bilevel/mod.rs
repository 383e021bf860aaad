//! Discrete bilevel solving over efficiency-type lower-level graphs.
//!
//! The upper level minimizes `F` with respect to `K` over the sampled graph of
//! Ψ, Ψw or Ψ̄ intersected with `X × R^m`. Grids never prove nonexistence; an
//! infimum that is not attained shows up as a minimizer next to a flagged
//! missing limit point.

mod solve;

use serde::{Deserialize, Serialize};

use crate::cones::OrderingCone;
use crate::error::{check_dim, Error, Result};
use crate::mappings::ProbeOptions;
use crate::parametric::{Feasibility, ParametricMop, VectorFn};

pub use solve::{
    compare_concepts, compare_concepts_with, existence_check, solve, solve_with, Boundedness, ChainCheck,
    ClosednessFlag, ComparisonReport, ConceptSummary, ExistenceReport, GridMeta, Pair, PairRecord, PointProbe,
    SolveReport,
};

/// Upper-level data `(F, K, X)` bound to a lower-level problem.
#[derive(Clone, Debug)]
pub struct BilevelInstance {
    pub name: String,
    pub lower: ParametricMop,
    pub upper: VectorFn,
    pub cone: OrderingCone,
    /// X, with parameters playing the role of decisions (`contains(&[], x)`).
    pub x_set: Feasibility,
    /// Dominance tolerance for the upper level.
    pub upper_tol: f64,
}

impl BilevelInstance {
    pub fn validate(&self) -> Result<()> {
        self.lower.validate()?;
        check_dim(self.cone.dim(), self.upper.out_dim())?;
        if let Some(b) = self.x_set.sampling_box() {
            check_dim(self.lower.n, b.dim())?;
        }
        if !(self.upper_tol >= 0.0) {
            return Err(Error::Invalid("upper-level tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.upper.out_dim()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub probe: ProbeOptions,
    /// Radius of the local-minimality neighborhood, in grid steps.
    pub local_radius_steps: f64,
    /// Cap on the number of minimizers that get closedness probes.
    pub max_probed: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { probe: ProbeOptions::default(), local_radius_steps: 3.0, max_probed: 32 }
    }
}
