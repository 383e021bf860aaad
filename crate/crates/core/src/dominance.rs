//! Finite-set multiobjective kernel: nondominance, weak nondominance, domination property.
//!
//! `b` dominates `a` when `a − b ∈ C∖{0}`; in dual coordinates `u = (⟨d_j, ·⟩)_j`
//! this reads `u_b ≤ u_a + τ` componentwise with at least one `u_b < u_a − τ`.
//! Strict dominance (`a − b ∈ int C`) requires `u_b < u_a − τ` in every coordinate.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cones::{Membership, OrderingCone};
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImageSet {
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ImageSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let s = ImageSet { points, labels: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_labels(points: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let s = ImageSet { points, labels: Some(labels) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(first) = self.points.first() {
            for p in &self.points {
                check_dim(first.len(), p.len())?;
            }
        }
        if let Some(l) = &self.labels {
            check_dim(self.points.len(), l.len())?;
            let uniq: std::collections::BTreeSet<&String> = l.iter().collect();
            if uniq.len() != l.len() {
                return Err(Error::Invalid("image labels must be unique".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn scaled(&self, s: f64) -> ImageSet {
        ImageSet {
            points: self.points.iter().map(|p| p.iter().map(|x| x * s).collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn subset(&self, idx: &[usize]) -> ImageSet {
        ImageSet {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// One point per row; a leading `label` column when labels are present.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for (i, p) in self.points.iter().enumerate() {
            let mut rec: Vec<String> = Vec::with_capacity(p.len() + 1);
            if let Some(l) = &self.labels {
                rec.push(l[i].clone());
            }
            rec.extend(p.iter().map(|x| format!("{x:?}")));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, labeled: bool) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let mut it = rec.iter();
            if labeled {
                labels.push(it.next().unwrap_or_default().to_string());
            }
            let p = it
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("bad number `{s}`: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            points.push(p);
        }
        if labeled {
            Self::with_labels(points, labels)
        } else {
            Self::new(points)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationCheck {
    pub holds: bool,
    pub witness: Option<Vec<f64>>,
}

pub fn nondominated(images: &ImageSet, cone: &OrderingCone) -> Result<Vec<usize>> {
    nondominated_tol(images, cone, 0.0)
}

pub fn weakly_nondominated(images: &ImageSet, cone: &OrderingCone) -> Result<Vec<usize>> {
    weakly_nondominated_tol(images, cone, 0.0)
}

pub fn nondominated_tol(images: &ImageSet, cone: &OrderingCone, tol: f64) -> Result<Vec<usize>> {
    let flat = flatten(images, cone)?;
    Ok(efficient_flat(&flat, cone.dim(), cone, tol, Strength::Strong))
}

pub fn weakly_nondominated_tol(images: &ImageSet, cone: &OrderingCone, tol: f64) -> Result<Vec<usize>> {
    let flat = flatten(images, cone)?;
    Ok(efficient_flat(&flat, cone.dim(), cone, tol, Strength::Weak))
}

fn flatten(images: &ImageSet, cone: &OrderingCone) -> Result<Vec<f64>> {
    if images.is_empty() {
        return Err(Error::EmptyInput("image set"));
    }
    images.validate()?;
    check_dim(cone.dim(), images.dim())?;
    Ok(images.points.iter().flatten().copied().collect())
}

/// Indices (ascending) of the nondominated (`Strong`) or weakly nondominated
/// (`Weak`) rows of a row-major `q`-column buffer.
pub fn efficient_flat(data: &[f64], q: usize, cone: &OrderingCone, tol: f64, mode: Strength) -> Vec<usize> {
    let n = data.len() / q;
    if n == 0 {
        return vec![];
    }
    let k = cone.dual_f().len();
    let mut u = vec![0.0; n * k];
    for i in 0..n {
        cone.transform_into(&data[i * q..(i + 1) * q], &mut u[i * k..(i + 1) * k]);
    }
    let dominated = match k {
        1 => dominated_1(&u, tol),
        2 => dominated_2(&u, n, tol, mode),
        _ => dominated_k(&u, n, k, tol, mode),
    };
    (0..n).filter(|&i| !dominated[i]).collect()
}

fn dominated_1(u: &[f64], tol: f64) -> Vec<bool> {
    let min = u.iter().copied().fold(f64::INFINITY, f64::min);
    u.iter().map(|&a| min < a - tol).collect()
}

fn dominated_2(u: &[f64], n: usize, tol: f64, mode: Strength) -> Vec<bool> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[2 * a].total_cmp(&u[2 * b]));
    let us: Vec<f64> = order.iter().map(|&i| u[2 * i]).collect();
    let mut prefix_min = Vec::with_capacity(n);
    let mut m = f64::INFINITY;
    for &i in &order {
        m = m.min(u[2 * i + 1]);
        prefix_min.push(m);
    }
    // min of v over rows whose first coordinate is < bound (strict) or ≤ bound
    let min_below = |bound: f64, strict: bool| -> f64 {
        let cnt = if strict { us.partition_point(|&x| x < bound) } else { us.partition_point(|&x| x <= bound) };
        if cnt == 0 {
            f64::INFINITY
        } else {
            prefix_min[cnt - 1]
        }
    };
    (0..n)
        .map(|i| {
            let (ua, va) = (u[2 * i], u[2 * i + 1]);
            match mode {
                Strength::Weak => min_below(ua - tol, true) < va - tol,
                Strength::Strong => min_below(ua - tol, true) <= va + tol || min_below(ua + tol, false) < va - tol,
            }
        })
        .collect()
}

fn dominated_k(u: &[f64], n: usize, k: usize, tol: f64, mode: Strength) -> Vec<bool> {
    // a dominator has coordinate sum below sum_a + k·tol
    let sums: Vec<f64> = (0..n).map(|i| u[i * k..(i + 1) * k].iter().sum()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sums[a].total_cmp(&sums[b]));
    let sorted_sums: Vec<f64> = order.iter().map(|&i| sums[i]).collect();
    (0..n)
        .map(|a| {
            let ua = &u[a * k..(a + 1) * k];
            let limit = sorted_sums.partition_point(|&s| s <= sums[a] + k as f64 * tol);
            order[..limit].iter().any(|&b| b != a && dominates(&u[b * k..(b + 1) * k], ua, tol, mode))
        })
        .collect()
}

#[inline]
pub(crate) fn dominates(ub: &[f64], ua: &[f64], tol: f64, mode: Strength) -> bool {
    match mode {
        Strength::Weak => ub.iter().zip(ua).all(|(b, a)| *b < a - tol),
        Strength::Strong => {
            ub.iter().zip(ua).all(|(b, a)| *b <= a + tol) && ub.iter().zip(ua).any(|(b, a)| *b < a - tol)
        }
    }
}

/// Reference O(n²) check straight from the cone definition; used as a test oracle and in benches.
pub fn nondominated_exhaustive(images: &ImageSet, cone: &OrderingCone, tol: f64, mode: Strength) -> Result<Vec<usize>> {
    flatten(images, cone)?;
    let pts = &images.points;
    let mut out = Vec::new();
    let mut diff = vec![0.0; cone.dim()];
    'outer: for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            for (d, (x, y)) in diff.iter_mut().zip(a.iter().zip(b)) {
                *d = x - y;
            }
            let hit = match mode {
                Strength::Weak => cone.contains_tol(&diff, Membership::Interior, tol),
                Strength::Strong => {
                    cone.contains_tol(&diff, Membership::Closed, tol) && cone.transform(&diff).iter().any(|s| *s > tol)
                }
            };
            if hit {
                continue 'outer;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// Checks `images ⊂ ND + C` (strong) or `images ⊂ WND + C` (weak); the witness is an uncovered point.
pub fn domination_holds(images: &ImageSet, cone: &OrderingCone, mode: Strength) -> Result<DominationCheck> {
    let front = match mode {
        Strength::Strong => nondominated(images, cone)?,
        Strength::Weak => weakly_nondominated(images, cone)?,
    };
    let tf: Vec<Vec<f64>> = images.points.iter().map(|p| cone.transform(p)).collect();
    for (i, ti) in tf.iter().enumerate() {
        let covered = front.iter().any(|&j| tf[j].iter().zip(ti).all(|(f, t)| f <= t));
        if !covered {
            return Ok(DominationCheck { holds: false, witness: Some(images.points[i].clone()) });
        }
    }
    Ok(DominationCheck { holds: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;

    fn set(p: &[[f64; 2]]) -> ImageSet {
        ImageSet::new(p.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn small_examples() {
        let o = OrderingCone::orthant(2);
        let s = set(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(nondominated(&s, &o).unwrap(), vec![0]);
        let s = set(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert_eq!(nondominated(&s, &o).unwrap(), vec![0, 1, 2]);
        let s = set(&[[0.0, 1.0], [0.0, 2.0], [1.0, 0.0]]);
        assert_eq!(weakly_nondominated(&s, &o).unwrap(), vec![0, 1, 2]);
        assert_eq!(nondominated(&s, &o).unwrap(), vec![0, 2]);
        let s = set(&[[0.0, 0.0]]);
        assert_eq!(weakly_nondominated(&s, &o).unwrap(), vec![0]);
    }

    #[test]
    fn ties_are_retained() {
        let o = OrderingCone::orthant(2);
        let s = set(&[[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(nondominated(&s, &o).unwrap(), vec![0, 1]);
    }

    #[test]
    fn empty_input_is_an_error() {
        let o = OrderingCone::orthant(2);
        assert_eq!(nondominated(&ImageSet::default(), &o), Err(Error::EmptyInput("image set")));
    }

    #[test]
    fn tolerance_absorbs_round_off() {
        let o = OrderingCone::orthant(2);
        let s = set(&[[0.0, 0.0], [1e-16, 3.0], [-1e-16, 3.0]]);
        assert_eq!(weakly_nondominated(&s, &o).unwrap(), vec![0, 2]);
        assert_eq!(weakly_nondominated_tol(&s, &o, 1e-12).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn general_cone_matches_exhaustive() {
        let c = OrderingCone::new(2, vec![qv(&[1, 2]), qv(&[2, 1])]).unwrap();
        let s = set(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [-1.0, 1.0], [3.0, 2.0], [2.0, 3.0]]);
        for m in [Strength::Strong, Strength::Weak] {
            let fast = efficient_flat(&s.points.concat(), 2, &c, 0.0, m);
            assert_eq!(fast, nondominated_exhaustive(&s, &c, 0.0, m).unwrap());
        }
    }

    #[test]
    fn domination_property() {
        let o = OrderingCone::orthant(2);
        let s = set(&[[0.0, 2.0], [1.0, 1.0], [2.0, 2.0], [3.0, 0.5]]);
        assert!(domination_holds(&s, &o, Strength::Strong).unwrap().holds);
        assert!(domination_holds(&s, &o, Strength::Weak).unwrap().holds);
    }

    #[test]
    fn csv_round_trip() {
        let s = ImageSet::with_labels(vec![vec![0.5, -1.0], vec![0.1, 0.2]], vec!["a".into(), "b".into()]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(ImageSet::read_csv(&buf[..], true).unwrap(), s);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<ImageSet>(&j).unwrap(), s);
    }
}
