//! JSON problem specs for inline (non-catalog) problems.

use std::sync::Arc;

use serde::Deserialize;

use super::catalog::CatalogEntry;
use super::grid::{nums, GridSpec, Num};
use super::problem::{BoxRegion, Feasibility, LinearData, Oracles, ParametricMop, PolyData, VectorFn, FEAS_TOL};
use crate::bilevel::BilevelInstance;
use crate::cones::OrderingCone;
use crate::error::{check_dim, Error, Result};
use crate::expr::Expr;
use crate::rational::{unwrap_mat, unwrap_vec, vec_to_f64, Rat};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    name: String,
    n: usize,
    m: usize,
    q: usize,
    cone: Option<OrderingCone>,
    #[serde(default)]
    objectives: Vec<String>,
    /// Linear objective `f(x,y) = Dy` (rows of D), alternative to `objectives`.
    #[serde(rename = "D")]
    d_mat: Option<Vec<Vec<Rat>>>,
    feasibility: FeasJson,
    parameter_box: BoxJson,
    y_grid: Option<GridSpec>,
    x_grid: Option<GridSpec>,
    #[serde(default)]
    critical_points: Vec<Vec<Num>>,
    #[serde(default)]
    dominance_tol: f64,
    #[serde(default)]
    convex: bool,
    upper: Option<UpperJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxJson {
    lower: Vec<Num>,
    upper: Vec<Num>,
}

impl BoxJson {
    fn build(&self) -> Result<BoxRegion> {
        BoxRegion::new(nums(&self.lower), nums(&self.upper))
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FeasJson {
    Box {
        lower: Vec<Num>,
        upper: Vec<Num>,
    },
    Polyhedral {
        #[serde(rename = "A")]
        a: Vec<Vec<Rat>>,
        #[serde(rename = "B")]
        b: Vec<Vec<Rat>>,
        d: Vec<Rat>,
        truncation: Option<BoxJson>,
    },
    Constraints {
        constraints: Vec<String>,
        truncation: BoxJson,
        #[serde(default = "yes")]
        truncates: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpperJson {
    objectives: Vec<String>,
    cone: Option<OrderingCone>,
    x_set: BoxJson,
    #[serde(default)]
    tol: f64,
}

/// `lhs <= rhs` or `lhs >= rhs` compiled to `g(x,y) ≤ 0`.
fn constraint(src: &str, n: usize, m: usize) -> Result<(Expr, Expr, bool)> {
    let (l, r, le) = if let Some((l, r)) = src.split_once("<=") {
        (l, r, true)
    } else if let Some((l, r)) = src.split_once(">=") {
        (l, r, false)
    } else {
        return Err(Error::Spec(format!("constraint `{src}` needs `<=` or `>=`")));
    };
    Ok((Expr::parse(l, n, m)?, Expr::parse(r, n, m)?, le))
}

pub fn load_problem_spec(json: &str) -> Result<CatalogEntry> {
    let s: SpecJson = serde_json::from_str(json)?;
    let (n, m, q) = (s.n, s.m, s.q);
    let cone = s.cone.unwrap_or_else(|| OrderingCone::orthant(q));
    check_dim(q, cone.dim())?;
    let x_box = s.parameter_box.build()?;
    check_dim(n, x_box.dim())?;

    let gamma = match s.feasibility {
        FeasJson::Box { lower, upper } => Feasibility::Box(BoxRegion::new(nums(&lower), nums(&upper))?),
        FeasJson::Polyhedral { a, b, d, truncation } => Feasibility::Polyhedral {
            data: PolyData::new(unwrap_mat(&a), unwrap_mat(&b), unwrap_vec(&d), n, m)?,
            truncation: truncation.map(|t| t.build()).transpose()?,
        },
        FeasJson::Constraints { constraints, truncation, truncates } => {
            let cs = constraints.iter().map(|c| constraint(c, n, m)).collect::<Result<Vec<_>>>()?;
            Feasibility::Oracle {
                contains: Arc::new(move |x, y| {
                    cs.iter().all(|(l, r, le)| {
                        let g = l.eval(x, y) - r.eval(x, y);
                        if *le {
                            g <= FEAS_TOL
                        } else {
                            g >= -FEAS_TOL
                        }
                    })
                }),
                truncation: truncation.build()?,
                truncates,
            }
        }
    };
    if let Some(b) = gamma.sampling_box() {
        check_dim(m, b.dim())?;
    }

    let (f, linear) = match s.d_mat {
        Some(dm) => {
            let d_mat = unwrap_mat(&dm);
            check_dim(q, d_mat.len())?;
            let df: Vec<Vec<f64>> = d_mat.iter().map(|r| vec_to_f64(r)).collect();
            for r in &df {
                check_dim(m, r.len())?;
            }
            let f = VectorFn::native(q, "Dy", move |_, y, o| {
                for (oi, r) in o.iter_mut().zip(&df) {
                    *oi = r.iter().zip(y).map(|(a, b)| a * b).sum();
                }
            });
            let linear = match &gamma {
                Feasibility::Polyhedral { data, .. } => Some(LinearData { d_mat, poly: data.clone() }),
                _ => None,
            };
            (f, linear)
        }
        None => {
            check_dim(q, s.objectives.len())?;
            (VectorFn::parse(&s.objectives, n, m)?, None)
        }
    };

    let crit: Vec<Vec<f64>> = s.critical_points.iter().map(|p| nums(p)).collect();
    for c in &crit {
        check_dim(m, c.len())?;
    }
    let oracles = Oracles {
        critical: (!crit.is_empty()).then(|| {
            let c = crit.clone();
            Arc::new(move |_: &[f64]| c.clone()) as super::problem::PointsFn
        }),
        ..Oracles::default()
    };
    let problem = ParametricMop {
        name: s.name.clone(),
        n,
        m,
        q,
        f,
        gamma,
        cone,
        x_box: x_box.clone(),
        oracles,
        dominance_tol: s.dominance_tol,
        convex: s.convex,
        default_y_grid: s.y_grid,
        linear,
    };
    problem.validate()?;

    let instance = s
        .upper
        .map(|u| -> Result<BilevelInstance> {
            let upper = VectorFn::parse(&u.objectives, n, m)?;
            let p = upper.out_dim();
            let cone = u.cone.unwrap_or_else(|| OrderingCone::orthant(p));
            check_dim(p, cone.dim())?;
            let xs = u.x_set.build()?;
            check_dim(n, xs.dim())?;
            Ok(BilevelInstance {
                name: s.name.clone(),
                lower: problem.clone(),
                upper,
                cone,
                x_set: Feasibility::Box(xs),
                upper_tol: u.tol,
            })
        })
        .transpose()?;
    let x_grid = match s.x_grid {
        Some(g) => g,
        None => GridSpec::uniform(&x_box.lower, &x_box.upper, 0.5)?,
    };
    check_dim(n, x_grid.dim())?;
    Ok(CatalogEntry { problem, instance, x_grid, phi_w_closed: false, locally_bounded: false })
}
