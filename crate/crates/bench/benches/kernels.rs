use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use vfrlab::dominance::{nondominated_exhaustive, nondominated_tol};
use vfrlab::lp::lp_solve;
use vfrlab::mappings::{psi_sample, Concept};
use vfrlab::varanal::{limiting_normal_cone_union, local_models, GraphKind};
use vfrlab::{catalog_get, OrderingCone, Strength};
use vfrlab_bench::{images, random_lp};

fn dominance(c: &mut Criterion) {
    let mut g = c.benchmark_group("nondominated");
    for dim in [2, 3] {
        let cone = OrderingCone::orthant(dim);
        for n in [100, 1000] {
            let s = images(n, dim, 7);
            g.bench_with_input(BenchmarkId::new(format!("fast/q{dim}"), n), &s, |b, s| {
                b.iter(|| nondominated_tol(black_box(s), &cone, 0.0).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("exhaustive/q{dim}"), n), &s, |b, s| {
                b.iter(|| nondominated_exhaustive(black_box(s), &cone, 0.0, Strength::Strong).unwrap())
            });
        }
    }
    g.finish();
}

fn simplex(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp_solve");
    for (vars, rows) in [(3, 6), (6, 12), (10, 20)] {
        let lp = random_lp(vars, rows, 11);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{vars}x{rows}")), &lp, |b, lp| {
            b.iter(|| lp_solve(black_box(lp)).unwrap())
        });
    }
    g.finish();
}

fn normal_cones(c: &mut Criterion) {
    let mut g = c.benchmark_group("limiting_normal_cone_union");
    for (id, kind) in [("ex_4_1", GraphKind::Phi), ("ex_4_2", GraphKind::PhiW)] {
        let m = local_models(id).unwrap();
        let (u, at) = (m.graph(kind).unwrap().clone(), m.point());
        g.bench_function(format!("{id}/{}", kind.as_str()), |b| {
            b.iter(|| limiting_normal_cone_union(black_box(&u), &at).unwrap())
        });
    }
    g.finish();
}

fn slices(c: &mut Criterion) {
    let e = catalog_get("ex_3_1").unwrap();
    let grid = e.problem.y_grid().unwrap();
    c.bench_function("psi_sample/ex_3_1/eff", |b| {
        b.iter(|| psi_sample(&e.problem, black_box(&[0.0]), &grid, Concept::Eff).unwrap())
    });
}

criterion_group!(benches, dominance, simplex, normal_cones, slices);
criterion_main!(benches);
