//! Exact polyhedral variational analysis: normal cones of finite unions of
//! convex polyhedra, coderivative slices, and coderivative estimate checks on
//! local models of the catalog's graph mappings.

pub mod models;
pub mod normal;
pub mod oracle;
pub mod polyhedron;

pub use models::{
    estimate_check, golden_check, golden_check_with, local_models, strict_dual_sample, Estimate, EstimateReport,
    GoldenReport, GraphKind, LocalModels, Preimage, MODEL_IDS,
};
pub use normal::{
    angle_to_cone, coderivative_slice, inclusion_check, limiting_normal_cone_union, normal_cone_convex,
    regular_normal_cone, ConeUnion, Inclusion, SetUnion,
};
pub use oracle::{oracle_containment, proximal_normal_oracle, OracleCheck, ORACLE_ANGULAR_TOL, ORACLE_GENERATOR_TOL};
pub use polyhedron::{constraint, ConvexPolyhedron, PolyUnion, VRep};
