use proptest::prelude::*;

use vfrlab::dominance::{domination_holds, nondominated_exhaustive, nondominated_tol, weakly_nondominated_tol};
use vfrlab::lp::{lp_solve, LinearProgram, LpOutcome, Sense, VarKind};
use vfrlab::rational::{dot, q, qv, Q};
use vfrlab::{ImageSet, OrderingCone, Strength};

fn cone(kind: u8, dim: usize) -> OrderingCone {
    match (kind % 3, dim) {
        (1, 2) => OrderingCone::new(2, vec![qv(&[1, 0]), qv(&[1, 2])]).unwrap(),
        (2, 2) => OrderingCone::new(2, vec![qv(&[2, -1]), qv(&[-1, 2])]).unwrap(),
        (1, 3) => OrderingCone::new(3, vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[1, 1, 1])]).unwrap(),
        _ => OrderingCone::orthant(dim),
    }
}

/// Point sets with many exact ties (small integers) or generic reals.
fn image_sets() -> impl Strategy<Value = (ImageSet, u8)> {
    (2usize..=3, any::<bool>(), any::<u8>()).prop_flat_map(|(dim, ties, kind)| {
        let coord = if ties { (-3i32..=3).prop_map(f64::from).boxed() } else { (-5.0f64..5.0).boxed() };
        (prop::collection::vec(prop::collection::vec(coord, dim), 1..40), Just(kind))
            .prop_map(|(pts, kind)| (ImageSet::new(pts).unwrap(), kind))
    })
}

fn points_of(s: &ImageSet, idx: &[usize]) -> Vec<Vec<f64>> {
    let mut v: Vec<Vec<f64>> = idx.iter().map(|&i| s.points[i].clone()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fast_front_matches_brute_force((s, kind) in image_sets()) {
        let c = cone(kind, s.dim());
        prop_assert_eq!(nondominated_tol(&s, &c, 0.0).unwrap(),
            nondominated_exhaustive(&s, &c, 0.0, Strength::Strong).unwrap());
        prop_assert_eq!(weakly_nondominated_tol(&s, &c, 0.0).unwrap(),
            nondominated_exhaustive(&s, &c, 0.0, Strength::Weak).unwrap());
    }

    #[test]
    fn efficient_points_are_weakly_efficient((s, kind) in image_sets()) {
        let c = cone(kind, s.dim());
        let eff = nondominated_tol(&s, &c, 0.0).unwrap();
        let weff = weakly_nondominated_tol(&s, &c, 0.0).unwrap();
        prop_assert!(!eff.is_empty());
        prop_assert!(eff.iter().all(|i| weff.contains(i)));
    }

    #[test]
    fn every_point_is_dominated_by_the_front((s, kind) in image_sets()) {
        let c = cone(kind, s.dim());
        prop_assert!(domination_holds(&s, &c, Strength::Strong).unwrap().holds);
        prop_assert!(domination_holds(&s, &c, Strength::Weak).unwrap().holds);
    }

    #[test]
    fn invariant_under_dyadic_scaling((s, kind) in image_sets(), k in -4i32..=4) {
        let c = cone(kind, s.dim());
        let scaled = s.scaled(2f64.powi(k));
        prop_assert_eq!(nondominated_tol(&scaled, &c, 0.0).unwrap(), nondominated_tol(&s, &c, 0.0).unwrap());
        prop_assert_eq!(weakly_nondominated_tol(&scaled, &c, 0.0).unwrap(), weakly_nondominated_tol(&s, &c, 0.0).unwrap());
    }

    #[test]
    fn equivariant_under_permutation((s, kind) in image_sets(), seed in any::<u64>()) {
        let c = cone(kind, s.dim());
        let n = s.points.len();
        let mut order: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let permuted = ImageSet::new(order.iter().map(|&i| s.points[i].clone()).collect()).unwrap();
        let a = points_of(&s, &nondominated_tol(&s, &c, 0.0).unwrap());
        let b = points_of(&permuted, &nondominated_tol(&permuted, &c, 0.0).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn duplicated_points_share_their_status((s, kind) in image_sets()) {
        let c = cone(kind, s.dim());
        let mut pts = s.points.clone();
        pts.push(s.points[0].clone());
        let d = ImageSet::new(pts).unwrap();
        let eff = nondominated_tol(&d, &c, 0.0).unwrap();
        prop_assert_eq!(eff.contains(&0), eff.contains(&(d.points.len() - 1)));
    }
}

/// Bounded LPs over `0 ≤ x ≤ 4` with cuts satisfied at the origin.
fn lps() -> impl Strategy<Value = LinearProgram> {
    (1usize..=3).prop_flat_map(|vars| {
        (
            prop::collection::vec(prop::collection::vec(-4i64..=4, vars), 0..5),
            prop::collection::vec(0i64..=6, 5),
            prop::collection::vec(-3i64..=3, vars),
        )
            .prop_map(move |(cuts, rhs, obj)| {
                let mut rows: Vec<Vec<Q>> = cuts.iter().map(|r| qv(r)).collect();
                let mut b: Vec<Q> = rhs.iter().take(rows.len()).map(|&v| q(v)).collect();
                for i in 0..vars {
                    let mut r = vec![q(0); vars];
                    r[i] = q(1);
                    rows.push(r);
                    b.push(q(4));
                }
                LinearProgram {
                    objective: qv(&obj),
                    senses: vec![Sense::Le; rows.len()],
                    rows,
                    rhs: b,
                    vars: vec![VarKind::NonNeg; vars],
                }
            })
    })
}

fn lattice(vars: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = vec![vec![]];
    for _ in 0..vars {
        out = out
            .into_iter()
            .flat_map(|v| (0..=8).map(move |k| [v.clone(), vec![Q::new(k.into(), 2.into())]].concat()))
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplex_optimum_is_feasible_and_beats_every_lattice_point(lp in lps()) {
        let sol = match lp_solve(&lp).unwrap() {
            LpOutcome::Optimal(s) => s,
            other => return Err(TestCaseError::fail(format!("origin is feasible and the box is bounded: {other:?}"))),
        };
        for (r, b) in lp.rows.iter().zip(&lp.rhs) {
            prop_assert!(dot(r, &sol.x) <= *b);
        }
        prop_assert!(sol.x.iter().all(|v| *v >= q(0)));
        prop_assert_eq!(dot(&lp.objective, &sol.x), sol.value.clone());
        // independent oracle: no feasible half-integer lattice point does better
        for p in lattice(lp.objective.len()) {
            if lp.rows.iter().zip(&lp.rhs).all(|(r, b)| dot(r, &p) <= *b) {
                prop_assert!(dot(&lp.objective, &p) >= sol.value);
            }
        }
    }
}
