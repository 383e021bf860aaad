//! Seeded inputs for the criterion benches under `benches/`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vfrlab::lp::{LinearProgram, Sense, VarKind};
use vfrlab::rational::{q, qf};
use vfrlab::ImageSet;

/// `n` points uniform in `[-1, 1]^dim`, with a fraction of them on a convex front
/// so that the nondominated set is not trivially small.
pub fn images(n: usize, dim: usize, seed: u64) -> ImageSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|i| {
            let mut p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if i % 4 == 0 {
                let norm = p.iter().map(|v| (v + 1.0).powi(2)).sum::<f64>().sqrt().max(1e-9);
                p.iter_mut().for_each(|v| *v = (*v + 1.0) / norm - 1.0);
            }
            p
        })
        .collect();
    ImageSet::new(pts).expect("finite points")
}

/// A bounded, feasible LP: box `0 ≤ x ≤ 10` plus `rows` random `≤` cuts through
/// an interior point, with small-denominator rational data.
pub fn random_lp(vars: usize, rows: usize, seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for _ in 0..rows {
        let row: Vec<_> = (0..vars).map(|_| qf(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
        let at_center: vfrlab::Q = row.iter().map(|c| c * q(1)).sum();
        b.push(at_center + q(rng.gen_range(1..=5)));
        a.push(row);
    }
    for i in 0..vars {
        let mut row = vec![q(0); vars];
        row[i] = q(1);
        a.push(row);
        b.push(q(10));
    }
    let objective = (0..vars).map(|_| qf(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
    LinearProgram { objective, senses: vec![Sense::Le; a.len()], rows: a, rhs: b, vars: vec![VarKind::NonNeg; vars] }
}
