//! Brute-force proximal normals: project nearby points onto the union and
//! record the normalized residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::normal::{dot_f, solve_f64, ConeUnion};
use super::polyhedron::PolyUnion;
use crate::error::{check_dim, Error, Result};
use crate::polycone::combinations;
use crate::rational::{to_f64, vec_to_f64, Q};

struct FloatPiece {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    faces: Vec<Vec<usize>>,
}

impl FloatPiece {
    fn feasible(&self, y: &[f64]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(r, b)| dot_f(r, y) <= b + 1e-10 * (1.0 + b.abs()))
    }

    /// Exact projection: the nearest feasible projection onto an affine face hull.
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for f in &self.faces {
            let y = if f.is_empty() {
                x.to_vec()
            } else {
                let gram: Vec<Vec<f64>> =
                    f.iter().map(|&i| f.iter().map(|&j| dot_f(&self.rows[i], &self.rows[j])).collect()).collect();
                let res: Vec<f64> = f.iter().map(|&i| dot_f(&self.rows[i], x) - self.rhs[i]).collect();
                let Some(mu) = solve_f64(gram, res) else {
                    continue;
                };
                let mut y = x.to_vec();
                for (&i, m) in f.iter().zip(&mu) {
                    for (yk, rk) in y.iter_mut().zip(&self.rows[i]) {
                        *yk -= m * rk;
                    }
                }
                y
            };
            if !self.feasible(&y) {
                continue;
            }
            let d = dist2(x, &y);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        }
        best.expect("nonempty polyhedron has a feasible face projection").1
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = dot_f(v, v).sqrt();
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn sphere(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        if let Some(u) = unit(&v) {
            return u;
        }
    }
}

fn float_union(u: &PolyUnion) -> Vec<FloatPiece> {
    let d = u.dim();
    u.pieces
        .iter()
        .map(|p| {
            let rows: Vec<Vec<f64>> = p.rows().iter().map(|r| vec_to_f64(r)).collect();
            let rhs: Vec<f64> = p.rhs().iter().map(to_f64).collect();
            let faces = (0..=d.min(rows.len())).flat_map(|k| combinations(rows.len(), k)).collect();
            FloatPiece { rows, rhs, faces }
        })
        .collect()
}

fn project_union(pieces: &[FloatPiece], x: &[f64]) -> (usize, Vec<f64>) {
    pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.project(x)))
        .min_by(|a, b| dist2(x, &a.1).total_cmp(&dist2(x, &b.1)))
        .expect("nonempty union")
}

/// Emits `samples` unit proximal-normal directions at points of `U` near `x̄`.
///
/// Half of the probes are uniform in the ball of the given radius; the other
/// half start from a projected point `y` and move along a random nonnegative
/// combination of the constraint normals tight at `y` (slightly jittered), so
/// that lower-dimensional faces are probed as often as full-dimensional ones.
pub fn proximal_normal_oracle(
    u: &PolyUnion,
    xbar: &[Q],
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    check_dim(u.dim(), xbar.len())?;
    if !u.contains(xbar) {
        return Err(Error::Infeasible(format!("reference point is not in `{}`", u.label)));
    }
    if !(radius > 0.0) {
        return Err(Error::Invalid("oracle radius must be positive".into()));
    }
    let d = u.dim();
    let xb = vec_to_f64(xbar);
    let pieces = float_union(u);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while out.len() < samples && attempts < samples.saturating_mul(50).max(100) {
        attempts += 1;
        let x: Vec<f64> = if attempts.is_multiple_of(2) {
            let s = rng.gen_range(0.05..1.0) * radius;
            xb.iter().zip(sphere(&mut rng, d)).map(|(a, v)| a + s * v).collect()
        } else {
            let w: Vec<f64> = {
                let s = rng.gen_range(0.0..1.0) * radius;
                xb.iter().zip(sphere(&mut rng, d)).map(|(a, v)| a + s * v).collect()
            };
            let (pi, y) = project_union(&pieces, &w);
            let p = &pieces[pi];
            let tight: Vec<&Vec<f64>> = p
                .rows
                .iter()
                .zip(&p.rhs)
                .filter(|(r, b)| (dot_f(r, &y) - **b).abs() <= 1e-10)
                .map(|(r, _)| r)
                .collect();
            let dir = if tight.is_empty() {
                sphere(&mut rng, d)
            } else {
                let mut v = vec![0.0; d];
                let single = rng.gen_bool(0.5);
                let pick = rng.gen_range(0..tight.len());
                for (k, r) in tight.iter().enumerate() {
                    let wgt = if single { f64::from(u8::from(k == pick)) } else { rng.gen::<f64>() };
                    let rn = dot_f(r, r).sqrt();
                    for (vi, ri) in v.iter_mut().zip(r.iter()) {
                        *vi += wgt * ri / rn;
                    }
                }
                for vi in v.iter_mut() {
                    *vi += 1e-7 * gaussian(&mut rng);
                }
                match unit(&v) {
                    Some(u) => u,
                    None => continue,
                }
            };
            let s = rng.gen_range(0.05..1.0) * radius;
            y.iter().zip(&dir).map(|(a, v)| a + s * v).collect()
        };
        let (_, px) = project_union(&pieces, &x);
        let r: Vec<f64> = x.iter().zip(&px).map(|(a, b)| a - b).collect();
        if dot_f(&r, &r).sqrt() <= 1e-9 * radius {
            continue;
        }
        out.push(unit(&r).expect("nonzero residual"));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub label: String,
    pub samples: usize,
    /// Largest angle between an oracle direction and the cone union.
    pub max_outside_angle: f64,
    /// Largest, over unit generators of the cone union, of the smallest angle to an oracle direction.
    pub max_generator_gap: f64,
    pub angular_tol: f64,
    pub generator_tol: f64,
    pub passed: bool,
}

/// Angular tolerance for oracle directions lying in the cone union.
pub const ORACLE_ANGULAR_TOL: f64 = 1e-6;
/// Angular tolerance for every generator being approached by some direction.
pub const ORACLE_GENERATOR_TOL: f64 = 1e-3;

/// Runs the oracle and compares it with the cell-method cone in both directions.
pub fn oracle_containment(
    u: &PolyUnion,
    xbar: &[Q],
    cone: &ConeUnion,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<OracleCheck> {
    let dirs = proximal_normal_oracle(u, xbar, samples, radius, seed)?;
    let max_outside_angle = dirs.iter().map(|v| cone.angle_to(v)).fold(0.0, f64::max);
    let mut max_generator_gap: f64 = 0.0;
    for p in cone.pieces() {
        for g in p.generators() {
            let g = unit(&vec_to_f64(&g)).expect("nonzero generator");
            let best = dirs.iter().map(|v| dot_f(v, &g).clamp(-1.0, 1.0).acos()).fold(std::f64::consts::PI, f64::min);
            max_generator_gap = max_generator_gap.max(best);
        }
    }
    let passed =
        dirs.len() == samples && max_outside_angle <= ORACLE_ANGULAR_TOL && max_generator_gap <= ORACLE_GENERATOR_TOL;
    Ok(OracleCheck {
        label: u.label.clone(),
        samples: dirs.len(),
        max_outside_angle,
        max_generator_gap,
        angular_tol: ORACLE_ANGULAR_TOL,
        generator_tol: ORACLE_GENERATOR_TOL,
        passed,
    })
}
