//! Product grids with force-included probe points.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::expr::eval_const;

/// Hard cap on the number of product-grid points per call.
pub const MAX_GRID_POINTS: usize = 20_000_000;

/// Probe coordinates this close (relative to the step) to an axis value replace it.
const SNAP: f64 = 1e-9;

/// A number given either literally or as a constant expression (`"pi/1000"`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(v) => Ok(Num(v)),
            Raw::S(s) => eval_const(&s).map(Num).map_err(serde::de::Error::custom),
        }
    }
}

pub(crate) fn nums(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

/// Row-major buffer of points sharing one dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Points {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize) -> Self {
        Points { dim, data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, p: &[f64]) {
        self.data.extend_from_slice(p);
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub fn from_vecs(dim: usize, v: &[Vec<f64>]) -> Self {
        Points { dim, data: v.iter().flatten().copied().collect() }
    }

    /// Sorts rows lexicographically and drops exact duplicates.
    pub fn sort_dedup(&mut self) {
        let d = self.dim;
        let mut rows: Vec<&[f64]> = self.data.chunks_exact(d).collect();
        rows.sort_by(|a, b| lex_cmp(a, b));
        rows.dedup();
        self.data = rows.concat();
    }
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub step: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridJson {
    lower: Vec<Num>,
    upper: Vec<Num>,
    step: StepJson,
    #[serde(default)]
    probes: Vec<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StepJson {
    One(Num),
    Many(Vec<Num>),
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GridJson::deserialize(d)?;
        let step = match j.step {
            StepJson::One(s) => vec![s.0; j.lower.len()],
            StepJson::Many(v) => nums(&v),
        };
        GridSpec::new(nums(&j.lower), nums(&j.upper), step)
            .and_then(|g| g.with_probes(j.probes.iter().map(|p| nums(p)).collect()))
            .map_err(serde::de::Error::custom)
    }
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, step: Vec<f64>) -> Result<Self> {
        let g = GridSpec { lower, upper, step, probes: vec![] };
        g.validate()?;
        Ok(g)
    }

    pub fn uniform(lower: &[f64], upper: &[f64], step: f64) -> Result<Self> {
        Self::new(lower.to_vec(), upper.to_vec(), vec![step; lower.len()])
    }

    /// A single point (zero extent, unit step).
    pub fn point(x: &[f64]) -> Self {
        GridSpec { lower: x.to_vec(), upper: x.to_vec(), step: vec![1.0; x.len()], probes: vec![] }
    }

    pub fn with_probes(mut self, probes: Vec<Vec<f64>>) -> Result<Self> {
        for p in &probes {
            check_dim(self.dim(), p.len())?;
            if !self.in_bounds(p) {
                return Err(Error::InvalidGrid(format!("probe {p:?} outside grid bounds")));
            }
        }
        self.probes = probes;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if d == 0 {
            return Err(Error::InvalidGrid("zero-dimensional grid".into()));
        }
        check_dim(d, self.upper.len())?;
        check_dim(d, self.step.len())?;
        for i in 0..d {
            if !(self.step[i] > 0.0 && self.step[i].is_finite()) {
                return Err(Error::InvalidGrid(format!("step {} on axis {i} must be positive", self.step[i])));
            }
            if !(self.lower[i] <= self.upper[i]) {
                return Err(Error::InvalidGrid(format!("lower > upper on axis {i}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn max_step(&self) -> f64 {
        self.step.iter().copied().fold(0.0, f64::max)
    }

    pub fn in_bounds(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(i, &v)| {
            let slack = SNAP * self.step[i];
            v >= self.lower[i] - slack && v <= self.upper[i] + slack
        })
    }

    /// Same bounds with every step divided by `2^levels`.
    pub fn refine(&self, levels: u32) -> GridSpec {
        let f = f64::from(1u32 << levels);
        GridSpec { step: self.step.iter().map(|s| s / f).collect(), ..self.clone() }
    }

    fn axis_len(&self, i: usize) -> usize {
        ((self.upper[i] - self.lower[i]) / self.step[i] + SNAP).floor() as usize + 1
    }

    pub fn count(&self) -> usize {
        (0..self.dim()).map(|i| self.axis_len(i)).product()
    }

    /// Axis values; when `1/step` and `lower/step` are integral the values are
    /// computed as exact decimal quotients `(L + k)/K`.
    pub fn axis(&self, i: usize, probes: &[&[f64]]) -> Vec<f64> {
        let (lo, h) = (self.lower[i], self.step[i]);
        let n = self.axis_len(i);
        let inv = 1.0 / h;
        let k = inv.round();
        let l0 = (lo * k).round();
        let decimal = (1.0..=1e9).contains(&k) && (inv - k).abs() <= 1e-9 * k && (lo * k - l0).abs() <= 1e-9;
        let mut vals: Vec<f64> =
            (0..n).map(|j| if decimal { (l0 + j as f64) / k } else { lo + j as f64 * h }).collect();
        for p in probes {
            let v = p[i];
            let j = ((v - lo) / h).round();
            if j >= 0.0 && (j as usize) < n && (vals[j as usize] - v).abs() <= SNAP * h {
                vals[j as usize] = v;
            }
        }
        vals
    }

    /// Product grid plus static probes plus in-bounds `extra` probes, sorted and deduplicated.
    pub fn points_with(&self, extra: &[Vec<f64>]) -> Result<Points> {
        let total = self.count();
        if total > MAX_GRID_POINTS {
            return Err(Error::InvalidGrid(format!("{total} grid points exceed the cap of {MAX_GRID_POINTS}")));
        }
        let d = self.dim();
        let probes: Vec<&[f64]> = self
            .probes
            .iter()
            .chain(extra.iter().filter(|p| p.len() == d && self.in_bounds(p)))
            .map(Vec::as_slice)
            .collect();
        let axes: Vec<Vec<f64>> = (0..d).map(|i| self.axis(i, &probes)).collect();
        let mut pts = Points { dim: d, data: Vec::with_capacity((total + probes.len()) * d) };
        let mut idx = vec![0usize; d];
        let mut cur: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        'outer: loop {
            pts.push(&cur);
            for ax in (0..d).rev() {
                idx[ax] += 1;
                if idx[ax] < axes[ax].len() {
                    cur[ax] = axes[ax][idx[ax]];
                    continue 'outer;
                }
                idx[ax] = 0;
                cur[ax] = axes[ax][0];
            }
            break;
        }
        for p in &probes {
            pts.push(p);
        }
        pts.sort_dedup();
        Ok(pts)
    }

    pub fn points(&self) -> Result<Points> {
        self.points_with(&[])
    }
}
