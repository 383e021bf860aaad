//! Worked examples with analytic oracles, probe points and default grids.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::grid::GridSpec;
use super::problem::{BoxRegion, Feasibility, LinearData, Oracles, ParametricMop, PolyData, SetOracle, VectorFn};
use crate::bilevel::BilevelInstance;
use crate::cones::OrderingCone;
use crate::error::{Error, Result};
use crate::rational::qv;

pub const CATALOG_IDS: &[&str] =
    &["ex_2_1", "ex_3_1", "ex_3_2", "ex_3_12", "ex_3_17", "ex_3_18", "ex_3_19", "ex_4_1", "ex_4_2", "convex_pair"];

/// Slack for closed conditions in exact-mode oracle tests.
const EPS: f64 = 1e-9;

/// Exponents `k` of the approach probes `c ± 2^{-k}` placed next to critical points.
const APPROACH: std::ops::RangeInclusive<i32> = 4..=14;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub problem: ParametricMop,
    pub instance: Option<BilevelInstance>,
    pub x_grid: GridSpec,
    /// Whether gph Φw is closed (enables the inclusion-chain checks).
    pub phi_w_closed: bool,
    /// Whether Γ is locally bounded (enables the Φ vs Φ−C closedness comparison).
    pub locally_bounded: bool,
}

pub fn catalog_get(id: &str) -> Result<CatalogEntry> {
    match id {
        "ex_2_1" => ex_2_1(),
        "ex_3_1" => ex_3_1(),
        "ex_3_2" => ex_3_2(),
        "ex_3_12" => ex_3_12(),
        "ex_3_17" => ex_3_17(),
        "ex_3_18" | "ex_3_19" => ex_3_18(id),
        "ex_4_1" => ex_4_1(),
        "ex_4_2" => ex_4_2(),
        "convex_pair" => convex_pair(),
        _ => Err(Error::UnknownCatalog { id: id.to_string(), valid: CATALOG_IDS.join(", ") }),
    }
}

fn oracle(f: impl Fn(&[f64], &[f64], f64) -> bool + Send + Sync + 'static) -> Option<SetOracle> {
    Some(Arc::new(f))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

fn slack(tol: f64) -> f64 {
    tol.max(EPS)
}

/// Finite union of intervals with per-end openness, on the real line.
#[derive(Clone, Copy)]
struct Iv {
    lo: f64,
    hi: f64,
    lo_open: bool,
}

impl Iv {
    fn closed(lo: f64, hi: f64) -> Self {
        Iv { lo, hi, lo_open: false }
    }

    fn point(v: f64) -> Self {
        Self::closed(v, v)
    }

    /// Exact membership (`tol = 0`) or distance to the closure at most `tol`.
    fn has(&self, v: f64, tol: f64) -> bool {
        if tol > 0.0 {
            return v >= self.lo - tol && v <= self.hi + tol;
        }
        let lo_ok = if self.lo_open { v > self.lo } else { v >= self.lo - EPS };
        lo_ok && v <= self.hi + EPS
    }

    fn project(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

fn union_has(ivs: &[Iv], v: f64, tol: f64) -> bool {
    ivs.iter().any(|i| i.has(v, tol))
}

/// Membership of `z` in `{(sin s, s) : s ∈ ivs}`.
fn sine_curve_has(ivs: &[Iv], z: &[f64], tol: f64) -> bool {
    if tol > 0.0 {
        let h = tol / 2.0;
        return ivs.iter().any(|i| {
            let s = i.project(z[1]);
            (z[1] - s).abs() <= h && (z[0] - s.sin()).abs() <= h
        });
    }
    union_has(ivs, z[1], 0.0) && (z[0] - z[1].sin()).abs() <= EPS
}

fn ex_3_1_sets() -> (Vec<Iv>, Vec<Iv>) {
    let eff = vec![Iv::point(0.0), Iv { lo: PI, hi: 1.5 * PI, lo_open: true }];
    let weff = vec![Iv::point(0.0), Iv::closed(PI, 1.5 * PI)];
    (eff, weff)
}

fn approach(c: f64, dir: f64) -> impl Iterator<Item = f64> {
    APPROACH.map(move |k| c + dir * 2f64.powi(-k))
}

fn ex_3_1_problem() -> ParametricMop {
    let (eff, weff) = ex_3_1_sets();
    let (e1, e2, w1, w2, w3, w4) = (eff.clone(), eff, weff.clone(), weff.clone(), weff.clone(), weff);
    let crit = vec![vec![0.0], vec![PI], vec![1.5 * PI]];
    let crit2 = crit.clone();
    let probes = move |_: &[f64]| {
        let mut p = crit2.clone();
        p.extend(approach(PI, 1.0).map(|v| vec![v]));
        p
    };
    let phi_minus_c = move |_: &[f64], z: &[f64], tol: f64| -> bool {
        let h = if tol > 0.0 { tol / 2.0 } else { EPS };
        let at_zero = z[0] <= h && z[1] <= h;
        let left = if tol > 0.0 { z[0] <= h } else { z[0] < 0.0 };
        let below_pi = z[1] <= PI + if tol > 0.0 { h } else { 0.0 } && left;
        let on_arc = z[1] > PI && z[1] <= 1.5 * PI + h && z[0] <= z[1].min(1.5 * PI).sin() + h;
        at_zero || below_pi || on_arc
    };
    ParametricMop {
        name: "ex_3_1".into(),
        n: 1,
        m: 1,
        q: 2,
        f: VectorFn::native(2, "(sin y, y)", |_, y, o| {
            o[0] = y[0].sin();
            o[1] = y[0];
        }),
        gamma: Feasibility::Box(BoxRegion::new(vec![0.0], vec![2.0 * PI]).expect("valid box")),
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, -1.0, 1.0),
        oracles: Oracles {
            psi: oracle(move |_, y, t| union_has(&e1, y[0], t)),
            psi_w: oracle(move |_, y, t| union_has(&w1, y[0], t)),
            psi_bar: oracle(move |_, y, t| union_has(&w2, y[0], t)),
            phi: oracle(move |_, z, t| sine_curve_has(&e2, z, t)),
            phi_w: oracle(move |_, z, t| sine_curve_has(&w3, z, t)),
            phi_bar: oracle(move |_, z, t| sine_curve_has(&w4, z, t)),
            phi_minus_c: oracle(phi_minus_c),
            probes: Some(Arc::new(probes)),
            critical: Some(Arc::new(move |_| crit.clone())),
        },
        dominance_tol: 1e-12,
        convex: false,
        default_y_grid: Some(
            GridSpec::uniform(&[0.0], &[2.0 * PI], PI / 1000.0)
                .and_then(|g| g.with_probes(vec![vec![0.0], vec![PI], vec![1.5 * PI]]))
                .expect("valid grid"),
        ),
        linear: None,
    }
}

fn ex_3_1() -> Result<CatalogEntry> {
    Ok(CatalogEntry {
        problem: ex_3_1_problem(),
        instance: None,
        x_grid: GridSpec::uniform(&[-1.0], &[1.0], 0.5)?,
        phi_w_closed: true,
        locally_bounded: true,
    })
}

fn ex_3_12() -> Result<CatalogEntry> {
    let lower = ex_3_1_problem();
    let x_grid = GridSpec::uniform(&[-1.0], &[1.0], 0.5)?;
    let instance = BilevelInstance {
        name: "ex_3_12".into(),
        lower: lower.clone(),
        upper: VectorFn::native(2, "(cos y + 1, (y - pi)^2)", |_, y, o| {
            o[0] = y[0].cos() + 1.0;
            o[1] = (y[0] - PI).powi(2);
        }),
        cone: OrderingCone::orthant(2),
        x_set: Feasibility::Box(BoxRegion::cube(1, -1.0, 1.0)),
        upper_tol: 1e-12,
    };
    Ok(CatalogEntry { problem: lower, instance: Some(instance), x_grid, phi_w_closed: true, locally_bounded: true })
}

fn ex_3_2() -> Result<CatalogEntry> {
    let line = |x: &[f64], y: &[f64], tol: f64| (y[0] + x[0] * y[1]).abs() / (1.0 + x[0] * x[0]).sqrt() <= slack(tol);
    let eff = move |x: &[f64], y: &[f64], tol: f64| x[0] > 0.0 && line(x, y, tol);
    let weff = move |x: &[f64], y: &[f64], tol: f64| x[0] >= 0.0 && line(x, y, tol);
    let crit = vec![vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, -1.0]];
    let problem = ParametricMop {
        name: "ex_3_2".into(),
        n: 1,
        m: 2,
        q: 2,
        f: VectorFn::native(2, "y", |_, y, o| o.copy_from_slice(y)),
        gamma: Feasibility::Oracle {
            contains: Arc::new(|x, y| y[0] + x[0] * y[1] >= -1e-12),
            truncation: BoxRegion::cube(2, -2.0, 2.0),
            truncates: true,
        },
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, -1.0, 1.0),
        oracles: Oracles {
            psi: oracle(eff),
            psi_w: oracle(weff),
            psi_bar: oracle(weff),
            phi: oracle(eff),
            phi_w: oracle(weff),
            phi_bar: oracle(weff),
            phi_minus_c: None,
            probes: None,
            critical: Some(Arc::new(move |_| crit.clone())),
        },
        dominance_tol: 0.0,
        convex: true,
        default_y_grid: Some(GridSpec::uniform(&[-2.0, -2.0], &[2.0, 2.0], 0.05)?),
        linear: None,
    };
    Ok(CatalogEntry {
        problem,
        instance: None,
        x_grid: GridSpec::uniform(&[-1.0], &[1.0], 0.5)?,
        phi_w_closed: false,
        locally_bounded: false,
    })
}

fn ex_3_17() -> Result<CatalogEntry> {
    let (eff, weff) = ex_3_1_sets();
    let on_diag = |y: &[f64], tol: f64| (y[0] - y[1]).abs() <= if tol > 0.0 { tol / 2.0 } else { EPS };
    let iso = [0.0, PI];
    let diag_in = move |ivs: &[Iv], y: &[f64], tol: f64| {
        let mid = 0.5 * (y[0] + y[1]);
        on_diag(y, tol) && union_has(ivs, mid, tol / 2.0)
    };
    let near_iso = move |y: &[f64], tol: f64| dist(y, &iso) <= slack(tol);
    let (e1, e2, w1, w2, w3, w4) = (eff.clone(), eff, weff.clone(), weff.clone(), weff.clone(), weff);
    let crit = vec![vec![0.0, PI], vec![0.0, 0.0], vec![PI, PI], vec![1.5 * PI, 1.5 * PI]];
    let crit2 = crit.clone();
    let probes = move |_: &[f64]| {
        let mut p = crit2.clone();
        p.extend(approach(PI, 1.0).map(|v| vec![v, v]));
        p
    };
    let problem = ParametricMop {
        name: "ex_3_17".into(),
        n: 1,
        m: 2,
        q: 2,
        f: VectorFn::native(2, "(sin y1, y2)", |_, y, o| {
            o[0] = y[0].sin();
            o[1] = y[1];
        }),
        gamma: Feasibility::Oracle {
            contains: Arc::new(move |_, y| {
                ((y[0] - y[1]).abs() <= 1e-12 && y[1] >= -1e-12 && y[1] <= 2.0 * PI + 1e-12) || dist(y, &iso) <= 1e-12
            }),
            truncation: BoxRegion::cube(2, 0.0, 2.0 * PI),
            truncates: false,
        },
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, -1.0, 1.0),
        oracles: Oracles {
            psi: oracle(move |_, y, t| diag_in(&e1, y, t)),
            psi_w: oracle(move |_, y, t| diag_in(&w1, y, t) || near_iso(y, t)),
            psi_bar: oracle(move |_, y, t| diag_in(&w2, y, t) || near_iso(y, t)),
            phi: oracle(move |_, z, t| sine_curve_has(&e2, z, t)),
            phi_w: oracle(move |_, z, t| sine_curve_has(&w3, z, t)),
            phi_bar: oracle(move |_, z, t| sine_curve_has(&w4, z, t)),
            phi_minus_c: None,
            probes: Some(Arc::new(probes)),
            critical: Some(Arc::new(move |_| crit.clone())),
        },
        dominance_tol: 1e-12,
        convex: false,
        default_y_grid: Some(GridSpec::uniform(&[0.0, 0.0], &[2.0 * PI, 2.0 * PI], PI / 200.0)?.with_probes(vec![
            vec![0.0, PI],
            vec![0.0, 0.0],
            vec![PI, PI],
            vec![1.5 * PI, 1.5 * PI],
        ])?),
        linear: None,
    };
    Ok(CatalogEntry {
        problem,
        instance: None,
        x_grid: GridSpec::point(&[0.0]),
        phi_w_closed: true,
        locally_bounded: true,
    })
}

/// Distance from `y` to the closed quarter arc of radius `r` in the first quadrant.
fn dist_arc(y: &[f64], r: f64) -> f64 {
    if y[0] >= 0.0 && y[1] >= 0.0 {
        ((y[0] * y[0] + y[1] * y[1]).sqrt() - r).abs()
    } else {
        dist(y, &[0.0, r]).min(dist(y, &[r, 0.0]))
    }
}

/// Distance from `y` to the segment `[a, b]`.
fn dist_seg(y: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(u, v)| v - u).collect();
    let len2: f64 = d.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (y.iter().zip(a).zip(&d).map(|((yi, ai), di)| (yi - ai) * di).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    let p: Vec<f64> = a.iter().zip(&d).map(|(ai, di)| ai + t * di).collect();
    dist(y, &p)
}

/// Arc-and-strip family: Γ(x) = {y ≥ 0 : ‖y‖ ≥ r} ∪ ([−1,0] × [r, ∞)), r = r(x).
fn arc_strip(name: &str, radius: fn(f64) -> f64, x_box: BoxRegion, y_step: f64) -> Result<ParametricMop> {
    let r_of = move |x: &[f64]| radius(x.first().copied().unwrap_or(0.0));
    let eff = move |x: &[f64], y: &[f64], tol: f64| {
        let r = r_of(x);
        if tol > 0.0 {
            return (r > 0.0 && dist_arc(y, r) <= tol) || dist(y, &[-1.0, r]) <= tol;
        }
        let on_arc = r > 0.0 && y[0] > 0.0 && y[1] >= -EPS && ((y[0] * y[0] + y[1] * y[1]).sqrt() - r).abs() <= EPS;
        on_arc || dist(y, &[-1.0, r]) <= EPS
    };
    let weff = move |x: &[f64], y: &[f64], tol: f64| {
        let r = r_of(x);
        let s = slack(tol);
        dist_arc(y, r) <= s
            || dist_seg(y, &[-1.0, r], &[0.0, r]) <= s
            || (y[0] >= r - s && y[1].abs() <= s)
            || ((y[0] + 1.0).abs() <= s && y[1] >= r - s)
    };
    let bar = move |x: &[f64], y: &[f64], tol: f64| {
        let r = r_of(x);
        let s = slack(tol);
        dist_arc(y, r) <= s || dist(y, &[-1.0, r]) <= s
    };
    let crit = move |x: &[f64]| {
        let r = r_of(x);
        vec![vec![0.0, r], vec![-1.0, r], vec![-0.25, r], vec![r, 0.0]]
    };
    let probes = move |x: &[f64]| {
        let r = r_of(x);
        let mut p = crit(x);
        if r > 0.0 {
            p.extend(approach(FRAC_PI_2, -1.0).map(|t| vec![r * t.cos(), r * t.sin()]));
        }
        p
    };
    Ok(ParametricMop {
        name: name.into(),
        n: 1,
        m: 2,
        q: 2,
        f: VectorFn::native(2, "y", |_, y, o| o.copy_from_slice(y)),
        gamma: Feasibility::Oracle {
            contains: Arc::new(move |x, y| {
                let r = r_of(x);
                let quad = y[0] >= -1e-12 && y[1] >= -1e-12 && y[0] * y[0] + y[1] * y[1] >= r * r - 1e-12;
                let strip = y[0] >= -1.0 - 1e-12 && y[0] <= 1e-12 && y[1] >= r - 1e-12;
                quad || strip
            }),
            truncation: BoxRegion::cube(2, -1.5, 2.0),
            truncates: true,
        },
        cone: OrderingCone::orthant(2),
        x_box,
        oracles: Oracles {
            psi: oracle(eff),
            psi_w: oracle(weff),
            psi_bar: oracle(bar),
            phi: oracle(eff),
            phi_w: oracle(weff),
            phi_bar: oracle(bar),
            phi_minus_c: None,
            probes: Some(Arc::new(probes)),
            critical: Some(Arc::new(crit)),
        },
        dominance_tol: 0.0,
        convex: false,
        default_y_grid: Some(GridSpec::uniform(&[-1.5, -1.5], &[2.0, 2.0], y_step)?),
        linear: None,
    })
}

fn ex_2_1() -> Result<CatalogEntry> {
    let problem = arc_strip("ex_2_1", |_| 1.0, BoxRegion::cube(1, 0.0, 0.0), 1.0 / 200.0)?;
    Ok(CatalogEntry {
        problem,
        instance: None,
        x_grid: GridSpec::point(&[0.0]),
        phi_w_closed: true,
        locally_bounded: false,
    })
}

fn ex_3_18(id: &str) -> Result<CatalogEntry> {
    let lower = arc_strip(id, f64::abs, BoxRegion::cube(1, -2.0, 2.0), 0.01)?;
    let x_grid = GridSpec::uniform(&[1.0], &[2.0], 0.01)?;
    let instance = BilevelInstance {
        name: id.into(),
        lower: lower.clone(),
        upper: VectorFn::native(1, "(y1 + 1/4)^2 + y2^2", |_, y, o| o[0] = (y[0] + 0.25).powi(2) + y[1] * y[1]),
        cone: OrderingCone::orthant(1),
        x_set: Feasibility::Box(BoxRegion::cube(1, 1.0, 2.0)),
        upper_tol: 0.0,
    };
    Ok(CatalogEntry { problem: lower, instance: Some(instance), x_grid, phi_w_closed: true, locally_bounded: false })
}

fn ex_4_1() -> Result<CatalogEntry> {
    let b = vec![qv(&[-1, -2]), qv(&[-2, -1]), qv(&[1, 0]), qv(&[0, 1])];
    let a = vec![qv(&[0]); 4];
    let d = qv(&[0, 0, 2, 2]);
    let poly = PolyData::new(a, b, d, 1, 2)?;
    let segs = |y: &[f64], tol: f64| {
        let s = slack(tol);
        dist_seg(y, &[-1.0, 2.0], &[0.0, 0.0]) <= s || dist_seg(y, &[2.0, -1.0], &[0.0, 0.0]) <= s
    };
    let eff = move |_: &[f64], y: &[f64], tol: f64| segs(y, tol);
    let crit = vec![vec![0.0, 0.0], vec![-1.0, 2.0], vec![2.0, -1.0]];
    let problem = ParametricMop {
        name: "ex_4_1".into(),
        n: 1,
        m: 2,
        q: 2,
        f: VectorFn::native(2, "y", |_, y, o| o.copy_from_slice(y)),
        gamma: Feasibility::Polyhedral { data: poly.clone(), truncation: None },
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, -1.0, 1.0),
        oracles: Oracles {
            psi: oracle(eff),
            psi_w: oracle(eff),
            psi_bar: oracle(eff),
            phi: oracle(eff),
            phi_w: oracle(eff),
            phi_bar: oracle(eff),
            phi_minus_c: None,
            probes: None,
            critical: Some(Arc::new(move |_| crit.clone())),
        },
        dominance_tol: 0.0,
        convex: true,
        default_y_grid: Some(GridSpec::uniform(&[-2.0, -2.0], &[2.0, 2.0], 0.25)?),
        linear: Some(LinearData { d_mat: vec![qv(&[1, 0]), qv(&[0, 1])], poly }),
    };
    Ok(CatalogEntry {
        problem,
        instance: None,
        x_grid: GridSpec::uniform(&[-1.0], &[1.0], 0.5)?,
        phi_w_closed: true,
        locally_bounded: true,
    })
}

fn ex_4_2_psi(x: f64) -> Iv {
    if x < 0.0 {
        Iv::closed(0.0, 1.0)
    } else {
        Iv::point(0.0)
    }
}

fn ex_4_2_psi_w(x: f64) -> Iv {
    if x <= 0.0 {
        Iv::closed(0.0, 1.0)
    } else {
        Iv::point(0.0)
    }
}

/// Membership of `z` in `{(x·y, y) : y ∈ iv}`.
fn ex_4_2_image(iv: Iv, x: f64, z: &[f64], tol: f64) -> bool {
    if tol > 0.0 {
        let h = tol / 2.0;
        let y = iv.project(z[1]);
        return (z[1] - y).abs() <= h && (z[0] - x * y).abs() <= h;
    }
    iv.has(z[1], 0.0) && (z[0] - x * z[1]).abs() <= EPS
}

fn ex_4_2() -> Result<CatalogEntry> {
    let phi_minus_c = |x: &[f64], z: &[f64], tol: f64| {
        let h = if tol > 0.0 { tol / 2.0 } else { EPS };
        if x[0] < 0.0 {
            // some t ∈ [0,1] with z1 ≤ x t and z2 ≤ t
            let lo = z[1].max(0.0);
            let hi = (z[0] / x[0]).min(1.0);
            lo <= hi + h
        } else {
            z[0] <= h && z[1] <= h
        }
    };
    let problem = ParametricMop {
        name: "ex_4_2".into(),
        n: 1,
        m: 1,
        q: 2,
        f: VectorFn::native(2, "(x*y, y)", |x, y, o| {
            o[0] = x[0] * y[0];
            o[1] = y[0];
        }),
        gamma: Feasibility::Box(BoxRegion::new(vec![0.0], vec![1.0])?),
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, -1.0, 1.0),
        oracles: Oracles {
            psi: oracle(|x, y, t| ex_4_2_psi(x[0]).has(y[0], t)),
            psi_w: oracle(|x, y, t| ex_4_2_psi_w(x[0]).has(y[0], t)),
            psi_bar: oracle(|x, y, t| ex_4_2_psi_w(x[0]).has(y[0], t)),
            phi: oracle(|x, z, t| ex_4_2_image(ex_4_2_psi(x[0]), x[0], z, t)),
            phi_w: oracle(|x, z, t| ex_4_2_image(ex_4_2_psi_w(x[0]), x[0], z, t)),
            phi_bar: oracle(|x, z, t| ex_4_2_image(ex_4_2_psi_w(x[0]), x[0], z, t)),
            phi_minus_c: oracle(phi_minus_c),
            probes: None,
            critical: Some(Arc::new(|_| vec![vec![0.0], vec![1.0]])),
        },
        dominance_tol: 0.0,
        convex: true,
        default_y_grid: Some(GridSpec::uniform(&[0.0], &[1.0], 0.01)?),
        linear: None,
    };
    Ok(CatalogEntry {
        problem,
        instance: None,
        x_grid: GridSpec::uniform(&[-1.0], &[1.0], 0.5)?,
        phi_w_closed: true,
        locally_bounded: true,
    })
}

fn convex_pair() -> Result<CatalogEntry> {
    let psi = |x: &[f64], y: &[f64], tol: f64| Iv::closed(-1.0, x[0]).has(y[0], tol);
    let image = move |x: &[f64], z: &[f64], tol: f64| {
        // z2 = (y+1)^2 with y ≥ −1 determines y
        let y = z[1].max(0.0).sqrt() - 1.0;
        psi(x, &[y], tol) && (z[0] - (y - x[0]).powi(2)).abs() <= slack(tol)
    };
    let problem = ParametricMop {
        name: "convex_pair".into(),
        n: 1,
        m: 1,
        q: 2,
        f: VectorFn::native(2, "((y - x)^2, (y + 1)^2)", |x, y, o| {
            o[0] = (y[0] - x[0]).powi(2);
            o[1] = (y[0] + 1.0).powi(2);
        }),
        gamma: Feasibility::Box(BoxRegion::new(vec![-2.0], vec![2.0])?),
        cone: OrderingCone::orthant(2),
        x_box: BoxRegion::cube(1, 0.0, 1.0),
        oracles: Oracles {
            psi: oracle(psi),
            psi_w: oracle(psi),
            psi_bar: oracle(psi),
            phi: oracle(image),
            phi_w: oracle(image),
            phi_bar: oracle(image),
            phi_minus_c: None,
            probes: None,
            critical: Some(Arc::new(|x| vec![vec![-1.0], vec![x[0]]])),
        },
        dominance_tol: 0.0,
        convex: true,
        default_y_grid: Some(GridSpec::uniform(&[-2.0], &[2.0], 0.01)?),
        linear: None,
    };
    let instance = BilevelInstance {
        name: "convex_pair".into(),
        lower: problem.clone(),
        upper: VectorFn::native(1, "(x - 1/2)^2 + (y - 1/4)^2", |x, y, o| {
            o[0] = (x[0] - 0.5).powi(2) + (y[0] - 0.25).powi(2)
        }),
        cone: OrderingCone::orthant(1),
        x_set: Feasibility::Box(BoxRegion::cube(1, 0.0, 1.0)),
        upper_tol: 0.0,
    };
    Ok(CatalogEntry {
        problem,
        instance: Some(instance),
        x_grid: GridSpec::uniform(&[0.0], &[1.0], 0.05)?,
        phi_w_closed: true,
        locally_bounded: true,
    })
}
