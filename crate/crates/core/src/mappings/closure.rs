//! Intermediate mappings: Φ̄ as persistent limits of frontier samples across
//! grid refinements, Ψ̄ as the feasible points whose images land in Φ̄.

use super::cloud::{CloudMeta, GraphCloud, GraphRecord};
use super::{confirm, evaluate, front, Concept, PsiSample, Truncation};
use crate::error::{Error, Result};
use crate::parametric::{GridSpec, ParametricMop, Points};
use crate::spatial::SpatialHash;

pub const DEFAULT_LEVELS: u32 = 2;

/// Relative widening of the distance tests, so that grid points at exactly the
/// tolerance (common on decimal grids) are not lost to rounding.
const ROUND_SLACK: f64 = 1e-9;

/// Intermediate sample at one parameter.
#[derive(Clone, Debug)]
pub struct BarSlice {
    pub x: Vec<f64>,
    /// Pulled-back decisions (Ψ̄ sample) and their images.
    pub decisions: Points,
    pub images: Points,
    /// Finest-level frontier samples that persist across all levels (Φ̄ sample).
    pub frontier: Points,
    /// Pull-back tolerance `2·step / 2^L`.
    pub eps: f64,
    pub levels: u32,
    pub feasible: usize,
    pub truncation: Truncation,
    pub artifacts: Points,
}

impl BarSlice {
    pub fn into_sample(self) -> PsiSample {
        PsiSample {
            x: self.x,
            concept: Concept::Bar,
            decisions: self.decisions,
            images: self.images,
            feasible: self.feasible,
            truncation: self.truncation,
            artifacts: self.artifacts,
        }
    }
}

pub(crate) fn bar_slice(
    problem: &ParametricMop,
    x: &[f64],
    grid: &GridSpec,
    levels: u32,
    extra: &[Vec<f64>],
) -> Result<BarSlice> {
    if levels < 2 {
        return Err(Error::Invalid(format!("intermediate closure needs at least 2 refinement levels, got {levels}")));
    }
    let q = problem.q;
    let h = grid.max_step();

    // frontier samples per level, coarse to fine
    let mut fronts: Vec<Vec<f64>> = Vec::with_capacity(levels as usize);
    for l in 0..levels {
        let ev = evaluate(problem, x, &grid.refine(l), extra)?;
        let idx = front(problem, &ev.zs, Concept::Eff);
        fronts.push(idx.iter().flat_map(|&i| ev.zs[i * q..(i + 1) * q].iter().copied()).collect());
    }
    let hashes: Vec<(SpatialHash, f64)> = fronts
        .iter()
        .enumerate()
        .map(|(l, z)| {
            let r = 2.0 * h / f64::from(1u32 << l) * (1.0 + ROUND_SLACK);
            (SpatialHash::new(z, q, r), r)
        })
        .collect();
    let finest = &fronts[levels as usize - 1];
    let mut frontier = Points::new(q);
    for z in finest.chunks_exact(q) {
        if hashes.iter().all(|(hs, r)| hs.any_within(z, *r)) {
            frontier.push(z);
        }
    }
    frontier.sort_dedup();

    let eps = 2.0 * h / f64::from(1u32 << levels);
    let reach = eps * (1.0 + ROUND_SLACK);
    let kept = SpatialHash::new(&frontier.data, q, reach);
    let ev = evaluate(problem, x, grid, extra)?;
    let idx: Vec<usize> = (0..ev.ys.len()).filter(|&i| kept.any_within(&ev.zs[i * q..(i + 1) * q], reach)).collect();
    let (keep, drop, truncation) = confirm(problem, Concept::Bar, x, h, idx, &ev.ys);
    let mut decisions = Points::new(problem.m);
    let mut images = Points::new(q);
    for &i in &keep {
        decisions.push(ev.ys.get(i));
        images.push(&ev.zs[i * q..(i + 1) * q]);
    }
    let mut artifacts = Points::new(problem.m);
    for &i in &drop {
        artifacts.push(ev.ys.get(i));
    }
    Ok(BarSlice {
        x: x.to_vec(),
        decisions,
        images,
        frontier,
        eps,
        levels,
        feasible: ev.ys.len(),
        truncation,
        artifacts,
    })
}

/// Graph sample of Ψ̄ over a parameter grid, tagged [`Concept::Bar`].
pub fn intermediate_closure(
    problem: &ParametricMop,
    x_grid: &GridSpec,
    y_grid: &GridSpec,
    levels: u32,
) -> Result<GraphCloud> {
    if levels < 2 {
        return Err(Error::Invalid(format!("intermediate closure needs at least 2 refinement levels, got {levels}")));
    }
    let mut cloud = GraphCloud::empty(problem, CloudMeta::new(problem, x_grid, y_grid, levels));
    for x in x_grid.points()?.iter() {
        let s = bar_slice(problem, x, y_grid, levels, &[])?;
        cloud.absorb(
            s.decisions.iter().zip(s.images.iter()).map(|(y, z)| GraphRecord {
                x: x.to_vec(),
                y: y.to_vec(),
                z: z.to_vec(),
                concept: Concept::Bar,
            }),
            x,
            s.truncation,
            s.artifacts.len(),
        );
    }
    Ok(cloud)
}
