//! Multiobjective bilevel optimization lab.
//!
//! Samples efficiency and frontier mappings of parametric multiobjective
//! problems, evaluates value-function reformulations, diagnoses graph
//! closedness, solves discretized bilevel instances, and checks coderivative
//! estimates with exact polyhedral computations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilevel;
pub mod cones;
pub mod dominance;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod lp;
pub mod mappings;
pub mod parametric;
pub mod polycone;
pub mod rational;
pub mod scalarize;
pub(crate) mod spatial;
pub mod varanal;

pub use bilevel::{BilevelInstance, ComparisonReport, SolveOptions, SolveReport};
pub use cones::{Membership, OrderingCone, SphereNorm};
pub use dominance::{ImageSet, Strength};
pub use error::{Error, Result};
pub use mappings::{Concept, GraphCloud, PsiSample, Verdict, VfrVariant};
pub use parametric::{catalog_get, CatalogEntry, GridSpec, ParametricMop, Points};
pub use rational::{Rat, Q};
pub use varanal::{ConeUnion, Estimate, LocalModels, SetUnion};
