use std::f64::consts::PI;

use vfrlab::mappings::{
    closedness_probe, graph_member, graph_sample, intermediate_closure, phi_sample, probe_battery, psi_sample,
    vfr_feasible, Concept, GraphSpace, GridRefinementSampler, OracleLatticeSampler, ProbeOptions, Truncation,
    UnionSampler, Verdict, VfrEvaluator, VfrVariant,
};
use vfrlab::parametric::{catalog_get, feasible_sample, GridSpec};

fn ys(p: &vfrlab::parametric::Points) -> Vec<Vec<f64>> {
    p.to_vecs()
}

#[test]
fn ex_3_1_efficient_and_weakly_efficient_sets() {
    let e = catalog_get("ex_3_1").unwrap();
    let g = e.problem.y_grid().unwrap();
    let h = PI / 1000.0;
    let eff = psi_sample(&e.problem, &[0.0], &g, Concept::Eff).unwrap();
    let weff = psi_sample(&e.problem, &[0.0], &g, Concept::Weff).unwrap();
    let has = |s: &[Vec<f64>], v: f64| s.iter().any(|p| p[0] == v);
    let eff_v = ys(&eff.decisions);
    let weff_v = ys(&weff.decisions);
    assert!(has(&eff_v, 0.0) && has(&eff_v, 1.5 * PI) && !has(&eff_v, PI));
    assert!(has(&weff_v, 0.0) && has(&weff_v, 1.5 * PI) && has(&weff_v, PI));
    // every sample lies in {0} ∪ [π, 3π/2] and every grid point of (π, 3π/2] is found
    for p in &eff_v {
        assert!(p[0] == 0.0 || (p[0] > PI && p[0] <= 1.5 * PI + 1e-12), "{p:?}");
    }
    for k in 1..=500 {
        let v = PI + k as f64 * h;
        assert!(eff_v.iter().any(|p| (p[0] - v).abs() < 1e-9), "missing {v}");
    }
    assert_eq!(eff.truncation, Truncation::None);
}

#[test]
fn ex_3_2_truncation_artifacts_are_removed() {
    let e = catalog_get("ex_3_2").unwrap();
    let g = e.problem.y_grid().unwrap();
    let w = psi_sample(&e.problem, &[-1.0], &g, Concept::Weff).unwrap();
    assert!(w.is_empty());
    assert!(!w.artifacts.is_empty());
    assert_eq!(w.truncation, Truncation::OracleConfirmed);

    let xg = GridSpec::uniform(&[-1.0], &[1.0], 1.0).unwrap();
    let weff = graph_sample(&e.problem, &xg, &g, Concept::Weff).unwrap();
    let xs = weff.xs();
    assert_eq!(xs, vec![vec![0.0], vec![1.0]]);
    for r in &weff.records {
        assert!((r.y[0] + r.x[0] * r.y[1]).abs() <= 0.05 + 1e-12, "{r:?}");
    }
    let eff = graph_sample(&e.problem, &xg, &g, Concept::Eff).unwrap();
    assert_eq!(eff.xs(), vec![vec![1.0]]);
}

#[test]
fn ex_4_2_frontiers() {
    let e = catalog_get("ex_4_2").unwrap();
    let g = e.problem.y_grid().unwrap();
    assert_eq!(phi_sample(&e.problem, &[1.0], &g, Concept::Weff).unwrap().to_vecs(), vec![vec![0.0, 0.0]]);
    let z = phi_sample(&e.problem, &[-1.0], &g, Concept::Weff).unwrap();
    assert_eq!(z.len(), 101);
    for p in z.iter() {
        assert!((p[0] + p[1]).abs() < 1e-12 && (0.0..=1.0).contains(&p[1]));
    }
}

#[test]
fn ex_3_1_frontier_images() {
    let e = catalog_get("ex_3_1").unwrap();
    let g = e.problem.y_grid().unwrap();
    let z = phi_sample(&e.problem, &[0.0], &g, Concept::Eff).unwrap();
    for p in z.iter() {
        assert!((p[0] - p[1].sin()).abs() < 1e-15);
        assert!(p[1] == 0.0 || (p[1] > PI && p[1] <= 1.5 * PI + 1e-12));
    }
}

#[test]
fn ex_3_17_intermediate_closure_adds_isolated_point() {
    let e = catalog_get("ex_3_17").unwrap();
    let g = e.problem.y_grid().unwrap();
    let bar = intermediate_closure(&e.problem, &e.x_grid, &g, 2).unwrap();
    assert!(bar.contains_pair(&[0.0], &[0.0, PI], 0.0));
    assert!(bar.contains_pair(&[0.0], &[PI, PI], 0.0));
    assert!(bar.contains_pair(&[0.0], &[0.0, 0.0], 0.0));
    let eff = graph_sample(&e.problem, &e.x_grid, &g, Concept::Eff).unwrap();
    assert!(!eff.contains_pair(&[0.0], &[0.0, PI], 0.5));
    // bar lies on the diagonal over {0} ∪ [π, 3π/2] plus the isolated point
    let h = PI / 200.0;
    for r in &bar.records {
        let iso = r.y == [0.0, PI];
        let diag = r.y[0] == r.y[1] && (r.y[0] == 0.0 || (r.y[0] >= PI - 1e-12 && r.y[0] <= 1.5 * PI + h));
        assert!(iso || diag, "{r:?}");
    }
    assert!(intermediate_closure(&e.problem, &e.x_grid, &g, 1).is_err());
}

#[test]
fn ex_3_18_intermediate_slice() {
    let e = catalog_get("ex_3_18").unwrap();
    let g = e.problem.y_grid().unwrap();
    let s = psi_sample(&e.problem, &[1.0], &g, Concept::Bar).unwrap();
    let v = ys(&s.decisions);
    assert!(v.contains(&vec![0.0, 1.0]));
    assert!(v.contains(&vec![-1.0, 1.0]));
    assert!(!v.contains(&vec![-0.25, 1.0]));
    for p in &v {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let on_arc = p[0] >= 0.0 && p[1] >= 0.0 && (r - 1.0).abs() <= 0.02;
        assert!(on_arc || *p == vec![-1.0, 1.0], "{p:?}");
    }
}

#[test]
fn feasible_sample_examples() {
    let e = catalog_get("ex_4_1").unwrap();
    let g = GridSpec::uniform(&[-2.0, -2.0], &[2.0, 2.0], 1.0).unwrap();
    let pts = feasible_sample(&e.problem, &[0.0], &g).unwrap().to_vecs();
    let mut expect = vec![];
    for a in -2..=2 {
        for b in -2..=2 {
            if a + 2 * b >= 0 && 2 * a + b >= 0 {
                expect.push(vec![a as f64, b as f64]);
            }
        }
    }
    assert_eq!(pts, expect);

    let e = catalog_get("ex_3_18").unwrap();
    let g = GridSpec::uniform(&[-1.5, -1.5], &[2.0, 2.0], 0.25).unwrap();
    let pts = feasible_sample(&e.problem, &[1.0], &g).unwrap();
    for p in pts.iter() {
        let quad = p[0] >= 0.0 && p[1] >= 0.0 && p[0] * p[0] + p[1] * p[1] >= 1.0 - 1e-12;
        let strip = (-1.0..=0.0).contains(&p[0]) && p[1] >= 1.0;
        assert!(quad || strip, "{p:?}");
    }
    assert_eq!(feasible_sample(&e.problem, &[1.0], &g).unwrap(), pts);
}

#[test]
fn closedness_probe_examples() {
    let opts = ProbeOptions::default();
    let radii = vfrlab::mappings::radius_schedule(opts.r0, opts.steps);
    let e = catalog_get("ex_3_1").unwrap();
    let p = &e.problem;
    let psi = p.oracles.psi.clone().unwrap();
    let lat = OracleLatticeSampler::new(psi.clone(), 1, p.x_box.clone());
    let v = closedness_probe(&graph_member(psi, 1), &lat, &[0.0, PI], &radii).unwrap();
    assert_eq!(v.verdict, Verdict::MissingLimitPoint);
    assert_eq!(v.witness.len(), radii.len());
    let psi_w = p.oracles.psi_w.clone().unwrap();
    let lat = OracleLatticeSampler::new(psi_w.clone(), 1, p.x_box.clone());
    let v = closedness_probe(&graph_member(psi_w, 1), &lat, &[0.0, PI], &radii).unwrap();
    assert_eq!(v.verdict, Verdict::ClosedHere);

    // grid-recomputed samples alone also reach (0, π)
    let gs = GridRefinementSampler::new(p, Concept::Eff, p.y_grid().unwrap(), GraphSpace::Decision);
    let psi = p.oracles.psi.clone().unwrap();
    let v = closedness_probe(&graph_member(psi, 1), &UnionSampler(vec![&gs]), &[0.0, PI], &radii).unwrap();
    assert_eq!(v.verdict, Verdict::MissingLimitPoint);

    let e = catalog_get("ex_3_2").unwrap();
    let psi = e.problem.oracles.psi.clone().unwrap();
    let lat = OracleLatticeSampler::new(psi.clone(), 1, e.problem.x_box.clone());
    let v = closedness_probe(&graph_member(psi, 1), &lat, &[0.0, 0.0, 1.0], &radii).unwrap();
    assert_eq!(v.verdict, Verdict::MissingLimitPoint);
}

#[test]
fn phi_and_phi_minus_cone_verdicts_agree() {
    for id in ["ex_3_1", "ex_4_2"] {
        let e = catalog_get(id).unwrap();
        assert!(e.locally_bounded);
        let recs = probe_battery(
            &e.problem,
            &e.x_grid.points().unwrap().to_vecs(),
            &e.problem.y_grid().unwrap(),
            &ProbeOptions::default(),
        )
        .unwrap();
        let mut compared = 0;
        for (i, r) in recs.iter().enumerate() {
            if r.graph != "phi_minus_c" {
                continue;
            }
            let phi = recs[..i]
                .iter()
                .rev()
                .find(|s| s.graph == "phi_eff" && s.verdict.candidate == r.verdict.candidate)
                .unwrap();
            let missing = |v: Verdict| v == Verdict::MissingLimitPoint;
            assert_eq!(missing(phi.verdict.verdict), missing(r.verdict.verdict), "{id} {:?}", r.verdict.candidate);
            compared += 1;
        }
        assert!(compared > 0);
    }
}

#[test]
fn ex_3_19_variants() {
    let e = catalog_get("ex_3_19").unwrap();
    let g = e.problem.y_grid().unwrap();
    let y = [-0.25, 1.0];
    assert!(!vfr_feasible(&e.problem, &[1.0], &y, VfrVariant::Ebar, &g, None).unwrap());
    assert!(vfr_feasible(&e.problem, &[1.0], &y, VfrVariant::EbarMinusC, &g, None).unwrap());
    assert!(vfr_feasible(&e.problem, &[1.0], &[-2.0, -2.0], VfrVariant::E, &g, None).is_err());

    let e = catalog_get("ex_3_1").unwrap();
    let g = e.problem.y_grid().unwrap();
    assert!(vfr_feasible(&e.problem, &[0.0], &[1.5 * PI], VfrVariant::E, &g, None).unwrap());
    assert!(!vfr_feasible(&e.problem, &[0.0], &[PI], VfrVariant::E, &g, None).unwrap());
    assert!(vfr_feasible(&e.problem, &[0.0], &[PI], VfrVariant::Ew, &g, None).unwrap());
}

#[test]
fn vfr_matches_psi_sample_on_the_grid() {
    for id in ["ex_3_1", "ex_4_2", "ex_3_19", "convex_pair"] {
        let e = catalog_get(id).unwrap();
        let g = e.problem.y_grid().unwrap();
        for x in e.x_grid.points().unwrap().iter().take(3) {
            let ev = VfrEvaluator::new(&e.problem, x, &g).unwrap();
            let eff = psi_sample(&e.problem, x, &g, Concept::Eff).unwrap().decisions.to_vecs();
            let weff = psi_sample(&e.problem, x, &g, Concept::Weff).unwrap().decisions.to_vecs();
            for y in ev.decisions().iter() {
                let in_eff = eff.iter().any(|p| p == y);
                let in_weff = weff.iter().any(|p| p == y);
                assert_eq!(ev.check(y, VfrVariant::E).unwrap(), in_eff, "{id} {y:?}");
                assert_eq!(ev.check(y, VfrVariant::EMinusC).unwrap(), in_eff, "{id} {y:?}");
                assert_eq!(ev.check(y, VfrVariant::Ew).unwrap(), in_weff, "{id} {y:?}");
                assert_eq!(ev.check(y, VfrVariant::EwMinusC).unwrap(), in_weff, "{id} {y:?}");
            }
        }
    }
}

#[test]
fn inclusion_chain_on_closed_weak_frontier() {
    for id in ["ex_3_1", "ex_3_17", "ex_4_2", "convex_pair"] {
        let e = catalog_get(id).unwrap();
        assert!(e.phi_w_closed);
        let g = e.problem.y_grid().unwrap();
        let xg = GridSpec::point(&e.x_grid.lower);
        let eff = graph_sample(&e.problem, &xg, &g, Concept::Eff).unwrap();
        let bar = graph_sample(&e.problem, &xg, &g, Concept::Bar).unwrap();
        let weff = graph_sample(&e.problem, &xg, &g, Concept::Weff).unwrap();
        let step = g.max_step() * 1.5;
        assert!(eff.missing_from(&bar, step).is_empty(), "{id}");
        assert!(bar.missing_from(&weff, step).is_empty(), "{id}");
    }
}
