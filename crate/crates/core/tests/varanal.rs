use vfrlab::lp::Sense;
use vfrlab::polycone::PolyCone;
use vfrlab::rational::{qv, Q};
use vfrlab::varanal::*;

fn cone(dim: usize, g: &[&[i64]]) -> PolyCone {
    PolyCone::from_generators(dim, &g.iter().map(|v| qv(v)).collect::<Vec<_>>()).unwrap()
}

fn poly(dim: usize, cons: &[(&[i64], Sense, i64)]) -> ConvexPolyhedron {
    let c: Vec<_> = cons.iter().map(|(r, s, b)| constraint(r, *s, *b)).collect();
    ConvexPolyhedron::from_constraints(dim, &c).unwrap()
}

#[test]
fn golden_files_match_exactly() {
    for id in MODEL_IDS {
        let r = golden_check(id).unwrap();
        for c in &r.cones {
            assert!(c.matches, "{id} {}: {:?} vs {:?}", c.graph, c.computed, c.expected);
        }
        for s in &r.slices {
            assert!(s.matches, "{id} {:?}: {} vs {}", s.graph, s.computed, s.expected);
        }
        assert!(r.passed);
    }
}

#[test]
fn golden_mismatch_is_reported() {
    let bad = vfrlab::varanal::models::GOLDEN_EX_4_1.replace(r#"[["0", "2", "1"]]"#, r#"[["0", "2", "-1"]]"#);
    let r = golden_check_with("ex_4_1", &bad).unwrap();
    assert!(!r.passed);
}

#[test]
fn planar_sigma_normal_cone() {
    let s =
        poly(2, &[(&[1, 2], Sense::Ge, 0), (&[2, 1], Sense::Ge, 0), (&[1, 0], Sense::Le, 2), (&[0, 1], Sense::Le, 2)]);
    assert_eq!(normal_cone_convex(&s, &qv(&[0, 0])).unwrap(), cone(2, &[&[-1, -2], &[-2, -1]]));
    assert!(normal_cone_convex(&s, &qv(&[1, 1])).unwrap().is_zero());
}

#[test]
fn two_segments_in_the_plane() {
    let a = poly(2, &[(&[2, 1], Sense::Eq, 0), (&[1, 0], Sense::Ge, -1), (&[1, 0], Sense::Le, 0)]);
    let b = poly(2, &[(&[1, 2], Sense::Eq, 0), (&[1, 0], Sense::Ge, 0), (&[1, 0], Sense::Le, 2)]);
    let u = PolyUnion::new("segments", vec![a, b]).unwrap();
    let n = limiting_normal_cone_union(&u, &qv(&[0, 0])).unwrap();
    let expected =
        ConeUnion::new(2, vec![cone(2, &[&[-1, -2], &[-2, -1]]), cone(2, &[&[2, 1]]), cone(2, &[&[1, 2]])]).unwrap();
    assert_eq!(n, expected);
    assert_eq!(n.pieces().len(), 3);
}

#[test]
fn ex_4_1_refutation() {
    let m = local_models("ex_4_1").unwrap();
    let z = qv(&[-1, -2]);
    let phi = m.coderivative(GraphKind::Phi, &z).unwrap();
    let sigma = m.coderivative(GraphKind::Sigma, &z).unwrap();
    assert_eq!(phi.describe(), "{0}");
    assert!(sigma.is_empty());
    let r = estimate_check("ex_4_1", Some(&m.point()), &z, Estimate::FrontierViaSigma).unwrap();
    assert!(!r.holds);
    assert!(!r.z_star_in_strict_dual);
    assert_eq!(r.witness.unwrap().len(), 1);
}

#[test]
fn ex_4_2_slices_at_boundary_weight() {
    let m = local_models("ex_4_2").unwrap();
    let z = qv(&[1, 0]);
    assert_eq!(m.coderivative(GraphKind::PhiW, &z).unwrap().describe(), "[0, +inf)");
    assert_eq!(m.coderivative(GraphKind::SigmaPlusC, &z).unwrap().describe(), "{0}");
    let r = estimate_check("ex_4_2", None, &z, Estimate::WeakFrontier).unwrap();
    assert!(!r.holds && !r.hypothesis_met);
    let w = r.witness.unwrap();
    assert!(w[0].0 > Q::from_integer(0.into()));
}

#[test]
fn ex_4_2_landscape_on_strict_dual() {
    let zs = strict_dual_sample(64);
    assert_eq!(zs.len(), 64);
    for z in &zs {
        for e in [Estimate::WeakFrontier, Estimate::ViaFeasibleMap] {
            let r = estimate_check("ex_4_2", None, z, e).unwrap();
            assert!(r.hypothesis_met && r.holds, "{e} at {z:?}");
            assert_eq!(r.lhs_text, "{0}");
            assert_eq!(r.rhs_text, "{0}");
        }
    }
}

#[test]
fn solution_map_estimate_is_sharp() {
    // D*Φw(z*) = D*Ψw(z2*) = {0} if z2* ≠ 0, R+ if z2* = 0
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            let z = qv(&[a, b]);
            let r = estimate_check("ex_4_2", None, &z, Estimate::ViaSolutionMap).unwrap();
            assert!(r.equality, "{z:?}");
            let want = if b == 0 { "[0, +inf)" } else { "{0}" };
            assert_eq!(r.lhs_text, want, "{z:?}");
        }
    }
}

#[test]
fn ex_4_1_chain_estimates_hold_on_strict_dual() {
    for z in strict_dual_sample(16) {
        for e in Estimate::ALL {
            let r = estimate_check("ex_4_1", None, &z, e).unwrap();
            assert!(r.holds, "{e} at {z:?}");
        }
    }
}

#[test]
fn missing_models_are_errors() {
    assert!(estimate_check("ex_3_1", None, &qv(&[1, 1]), Estimate::WeakFrontier).is_err());
    assert!(estimate_check("ex_4_2", None, &qv(&[1, 1]), Estimate::FrontierViaSigma).is_err());
    assert!(estimate_check("ex_4_2", Some(&qv(&[1, 0, 0])), &qv(&[1, 1]), Estimate::WeakFrontier).is_err());
}

fn all_models() -> Vec<(String, PolyUnion, Vec<Q>)> {
    let mut out = Vec::new();
    for id in MODEL_IDS {
        let m = local_models(id).unwrap();
        out.extend(m.labeled_sets().into_iter().map(|(name, u, at)| (name, u.clone(), at)));
    }
    out
}

#[test]
fn regular_cone_is_contained_and_convex_pieces_agree() {
    for (name, u, at) in all_models() {
        let lim = limiting_normal_cone_union(&u, &at).unwrap();
        let reg = regular_normal_cone(&u, &at).unwrap();
        assert!(lim.pieces().iter().any(|p| p.contains_cone(&reg)), "{name}");
        if u.pieces.len() == 1 {
            let conv = normal_cone_convex(&u.pieces[0], &at).unwrap();
            assert_eq!(lim, ConeUnion::new(conv.dim(), vec![conv]).unwrap(), "{name}");
        }
    }
}

#[test]
fn zero_weight_slice_contains_zero() {
    for id in MODEL_IDS {
        let m = local_models(id).unwrap();
        for &k in m.graphs.keys() {
            let s = m.coderivative(k, &vec![Q::from_integer(0.into()); m.q]).unwrap();
            assert!(s.contains(&qv(&[0])), "{id} {k:?}");
        }
    }
}

#[test]
fn inclusion_is_reflexive() {
    let m = local_models("ex_4_2").unwrap();
    let s = m.normal_cone(GraphKind::PhiW).unwrap().to_set().unwrap();
    assert!(inclusion_check(&s, &s).unwrap().holds);
}

#[test]
fn cone_union_json_round_trip() {
    let n = local_models("ex_4_1").unwrap().normal_cone(GraphKind::Phi).unwrap();
    let s = serde_json::to_string(&n).unwrap();
    let back: ConeUnion = serde_json::from_str(&s).unwrap();
    assert_eq!(back, n);
}

#[test]
fn oracle_containment_on_every_model() {
    for (name, u, at) in all_models() {
        let lim = limiting_normal_cone_union(&u, &at).unwrap();
        let c = oracle_containment(&u, &at, &lim, 10_000, 0.1, 0).unwrap();
        assert!(c.passed, "{name}: {c:?}");
    }
}

#[test]
fn oracle_directions_cover_both_psi_w_pieces() {
    let m = local_models("ex_4_2").unwrap();
    let p = &m.preimages[0];
    let dirs = proximal_normal_oracle(&p.psi_w, &qv(&[0, 0]), 10_000, 0.1, 7).unwrap();
    let near = |g: [f64; 2]| dirs.iter().any(|v| (v[0] - g[0]).abs() < 1e-3 && (v[1] - g[1]).abs() < 1e-3);
    assert!(near([1.0, 0.0]) && near([0.0, 1.0]) && near([0.0, -1.0]));
    // every normal of gph Ψw at the origin has a nonnegative x-component
    assert!(dirs.iter().all(|v| v[0] >= -1e-9));
}

/// Distance from `p` to gph Σ = {(x, t x, t) : t ∈ [0, 1]} of the bilinear example, by
/// closed-form minimization in x and a fine scan plus golden-section refinement in t.
fn dist_true_sigma(p: &[f64; 3], fan_only: bool) -> f64 {
    let f = |t: f64| {
        let mut x = (p[0] + t * p[1]) / (1.0 + t * t);
        if fan_only {
            x = x.min(0.0);
        }
        ((x - p[0]).powi(2) + (x * t - p[1]).powi(2) + (t - p[2]).powi(2)).sqrt()
    };
    let n = 4000;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let v = f(t);
        if v < best.0 {
            best = (v, t);
        }
    }
    let (mut lo, mut hi) = ((best.1 - 1.0 / n as f64).max(0.0), (best.1 + 1.0 / n as f64).min(1.0));
    for _ in 0..60 {
        let a = lo + (hi - lo) * 0.382;
        let b = lo + (hi - lo) * 0.618;
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi)).min(best.0)
}

#[test]
fn tangent_models_match_true_graphs_to_second_order() {
    // points of the model at distance r lie within O(r²) of the true set and vice versa
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for r in [1e-2, 1e-3] {
        for _ in 0..200 {
            let x: f64 = rng.gen_range(-1.0..1.0) * r;
            let t: f64 = rng.gen_range(0.0..1.0) * r;
            // model {z1 = 0, z2 ≥ 0} vs true gph Σ
            assert!(dist_true_sigma(&[x, 0.0, t], false) <= 2.0 * r * r);
            // true point back to the model: distance is |x t|
            assert!((x * t).abs() <= r * r);
            // fan part of gph Φw: model {x ≤ 0, z1 = 0, z2 ≥ 0}
            let xm = -x.abs();
            assert!(dist_true_sigma(&[xm, 0.0, t], true) <= 2.0 * r * r);
        }
    }
}
