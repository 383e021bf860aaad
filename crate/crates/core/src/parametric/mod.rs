//! Parametric lower-level problems, sampling grids, and the example catalog.

pub mod catalog;
pub mod grid;
pub mod problem;
pub mod spec;

pub use catalog::{catalog_get, CatalogEntry, CATALOG_IDS};
pub use grid::{GridSpec, Num, Points};
pub use problem::{
    feasible_sample, feasible_sample_with, BoxRegion, Feasibility, LinearData, Oracles, ParametricMop, PolyData,
    SetOracle, VectorFn,
};
pub use spec::load_problem_spec;
