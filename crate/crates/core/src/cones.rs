//! Polyhedral ordering cones: membership, duals, strict duals, dual-sphere sampling.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::polycone::{PolyCone, MAX_DIM};
use crate::rational::{dot, q, to_f64, unwrap_mat, vec_to_f64, wrap_mat, QVec, Rat, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Closed,
    Interior,
}

/// Norm used to normalize dual-sphere samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereNorm {
    #[default]
    Euclidean,
    One,
    Max,
}

impl SphereNorm {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            SphereNorm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            SphereNorm::One => v.iter().map(|x| x.abs()).sum(),
            SphereNorm::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn normalize(self, v: &[f64]) -> Vec<f64> {
        let n = self.norm(v);
        v.iter().map(|x| x / n).collect()
    }
}

/// Closed convex pointed cone with nonempty interior, finitely generated.
///
/// `dual_generators` are primitive integer vectors, so dual coordinates of
/// integer images are exact in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingCone {
    dim: usize,
    generators: Vec<QVec>,
    dual_generators: Vec<QVec>,
    dual_f: Vec<Vec<f64>>,
    gen_f: Vec<Vec<f64>>,
    orthant: bool,
}

impl OrderingCone {
    pub fn new(dim: usize, generators: Vec<QVec>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCone("dimension must be positive".into()));
        }
        for g in &generators {
            check_dim(dim, g.len())?;
            if g.iter().all(Zero::is_zero) {
                return Err(Error::InvalidCone("zero generator".into()));
            }
        }
        let is_orthant = generators.len() == dim
            && (0..dim).all(|i| generators.iter().any(|g| (0..dim).all(|j| g[j] == q((i == j) as i64))));
        if is_orthant {
            return Ok(Self::orthant(dim));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidCone(format!("only the orthant is supported in dimension {dim} > {MAX_DIM}")));
        }
        let cone = PolyCone::from_generators(dim, &generators)?;
        if !cone.is_pointed() {
            return Err(Error::InvalidCone("cone is not pointed".into()));
        }
        if cone.span_dim() < dim {
            return Err(Error::InvalidCone("cone has empty interior".into()));
        }
        let dual = cone.dual()?;
        let generators = cone.rays().to_vec();
        let dual_generators = dual.rays().to_vec();
        Ok(Self::assemble(dim, generators, dual_generators, is_orthant))
    }

    fn assemble(dim: usize, generators: Vec<QVec>, dual_generators: Vec<QVec>, orthant: bool) -> Self {
        let dual_f = dual_generators.iter().map(|g| vec_to_f64(g)).collect();
        let gen_f = generators.iter().map(|g| vec_to_f64(g)).collect();
        OrderingCone { dim, generators, dual_generators, dual_f, gen_f, orthant }
    }

    pub fn orthant(dim: usize) -> Self {
        let eye: Vec<QVec> = (0..dim).map(|i| (0..dim).map(|j| q((i == j) as i64)).collect()).collect();
        Self::assemble(dim, eye.clone(), eye, true)
    }

    pub fn from_f64(dim: usize, generators: &[Vec<f64>]) -> Result<Self> {
        let g = generators
            .iter()
            .map(|v| v.iter().map(|&x| crate::rational::from_f64(x)).collect::<Result<QVec>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_orthant(&self) -> bool {
        self.orthant
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    pub fn dual_generators(&self) -> &[QVec] {
        &self.dual_generators
    }

    pub(crate) fn dual_f(&self) -> &[Vec<f64>] {
        &self.dual_f
    }

    /// Coordinates `(⟨d_j, z⟩)_j` against the dual generators.
    pub fn transform(&self, z: &[f64]) -> Vec<f64> {
        self.dual_f.iter().map(|d| d.iter().zip(z).map(|(a, b)| a * b).sum()).collect()
    }

    pub(crate) fn transform_into(&self, z: &[f64], out: &mut [f64]) {
        for (o, d) in out.iter_mut().zip(&self.dual_f) {
            *o = d.iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    pub fn contains(&self, z: &[f64], mode: Membership) -> Result<bool> {
        check_dim(self.dim, z.len())?;
        Ok(self.contains_tol(z, mode, 0.0))
    }

    /// Membership with slack `tol` on every dual coordinate.
    pub fn contains_tol(&self, z: &[f64], mode: Membership, tol: f64) -> bool {
        self.dual_f.iter().all(|d| {
            let s: f64 = d.iter().zip(z).map(|(a, b)| a * b).sum();
            match mode {
                Membership::Closed => s >= -tol,
                Membership::Interior => s > tol,
            }
        })
    }

    pub fn contains_exact(&self, z: &[Q], mode: Membership) -> Result<bool> {
        check_dim(self.dim, z.len())?;
        Ok(self.dual_generators.iter().all(|d| {
            let s = dot(d, z);
            match mode {
                Membership::Closed => s >= Q::zero(),
                Membership::Interior => s > Q::zero(),
            }
        }))
    }

    /// The dual cone C* (again pointed with nonempty interior).
    pub fn dual_cone(&self) -> OrderingCone {
        Self::assemble(self.dim, self.dual_generators.clone(), self.generators.clone(), self.orthant)
    }

    /// Whether `λ ∈ C*`, with slack `tol`.
    pub fn dual_contains(&self, lambda: &[f64], tol: f64) -> bool {
        self.gen_f.iter().all(|g| g.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>() >= -tol)
    }

    /// Membership in C*_>: strictly positive on every generator.
    pub fn strict_dual_contains(&self, z_star: &[f64]) -> Result<bool> {
        check_dim(self.dim, z_star.len())?;
        Ok(self.gen_f.iter().all(|g| g.iter().zip(z_star).map(|(a, b)| a * b).sum::<f64>() > 0.0))
    }

    pub fn strict_dual_contains_exact(&self, z_star: &[Q]) -> Result<bool> {
        check_dim(self.dim, z_star.len())?;
        Ok(self.generators.iter().all(|g| dot(g, z_star) > Q::zero()))
    }

    /// Deterministic sample of `C* ∩ S₁(0)`.
    ///
    /// In the plane: `resolution` equally spaced angles between the two extreme
    /// rays of C*, endpoints included. In higher dimension: normalized points of
    /// the simplex grid with `resolution − 1` subdivisions over the dual generators.
    pub fn dual_sphere_grid(&self, resolution: usize, norm: SphereNorm) -> Result<Vec<Vec<f64>>> {
        if resolution < 2 {
            return Err(Error::Invalid("dual sphere resolution must be at least 2".into()));
        }
        if self.dual_generators.len() < self.dim {
            return Err(Error::InvalidCone("degenerate dual cone".into()));
        }
        let unit = |v: &[f64]| SphereNorm::Euclidean.normalize(v);
        match self.dim {
            1 => Ok(vec![norm.normalize(&self.dual_f[0])]),
            2 => {
                let mut a = unit(&self.dual_f[0]);
                let mut b = unit(&self.dual_f[1]);
                if a[0] * b[1] - a[1] * b[0] < 0.0 {
                    std::mem::swap(&mut a, &mut b);
                }
                let span = (a[0] * b[0] + a[1] * b[1]).clamp(-1.0, 1.0).acos();
                let perp = [-a[1], a[0]];
                let last = resolution - 1;
                Ok((0..resolution)
                    .map(|k| {
                        let v = if k == 0 {
                            a.clone()
                        } else if k == last {
                            b.clone()
                        } else {
                            let t = span * k as f64 / last as f64;
                            vec![t.cos() * a[0] + t.sin() * perp[0], t.cos() * a[1] + t.sin() * perp[1]]
                        };
                        norm.normalize(&v)
                    })
                    .collect())
            }
            _ => {
                let parts = resolution - 1;
                let k = self.dual_f.len();
                let mut out: Vec<Vec<f64>> = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                let mut comp = vec![0usize; k];
                compositions(parts, k, 0, &mut comp, &mut |c| {
                    let mut v = vec![0.0; self.dim];
                    for (w, g) in c.iter().zip(&self.dual_f) {
                        let g = unit(g);
                        for (vi, gi) in v.iter_mut().zip(&g) {
                            *vi += *w as f64 * gi;
                        }
                    }
                    let v = norm.normalize(&v);
                    let key: Vec<i64> = v.iter().map(|x| (x * 1e12).round() as i64).collect();
                    if seen.insert(key) {
                        out.push(v);
                    }
                });
                Ok(out)
            }
        }
    }
}

fn compositions(total: usize, k: usize, i: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if i + 1 == k {
        cur[i] = total;
        f(cur);
        return;
    }
    for v in (0..=total).rev() {
        cur[i] = v;
        compositions(total - v, k, i + 1, cur, f);
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConeJson {
    Orthant { orthant: usize },
    General { dim: usize, generators: Vec<Vec<Rat>> },
}

impl Serialize for OrderingCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.orthant {
            ConeJson::Orthant { orthant: self.dim }.serialize(s)
        } else {
            ConeJson::General { dim: self.dim, generators: wrap_mat(&self.generators) }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for OrderingCone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ConeJson::deserialize(d)? {
            ConeJson::Orthant { orthant } if orthant > 0 => Ok(OrderingCone::orthant(orthant)),
            ConeJson::Orthant { .. } => Err(serde::de::Error::custom("orthant dimension must be positive")),
            ConeJson::General { dim, generators } => {
                OrderingCone::new(dim, unwrap_mat(&generators)).map_err(serde::de::Error::custom)
            }
        }
    }
}

pub fn unit_f64(v: &[Q]) -> Vec<f64> {
    SphereNorm::Euclidean.normalize(&v.iter().map(to_f64).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;

    fn c12() -> OrderingCone {
        OrderingCone::new(2, vec![qv(&[1, 2]), qv(&[2, 1])]).unwrap()
    }

    #[test]
    fn membership_modes() {
        let o = OrderingCone::orthant(2);
        assert!(o.contains(&[0.0, 0.0], Membership::Closed).unwrap());
        assert!(!o.contains(&[0.0, 1.0], Membership::Interior).unwrap());
        assert!(c12().contains(&[1.0, 1.0], Membership::Interior).unwrap());
        assert!(!c12().contains(&[1.0, 0.0], Membership::Closed).unwrap());
        assert!(o.contains(&[1.0], Membership::Closed).is_err());
    }

    #[test]
    fn dual_of_generated_cone() {
        // {λ : λ1 + 2λ2 ≥ 0, 2λ1 + λ2 ≥ 0} has extreme rays (2,-1) and (-1,2)
        let d = c12().dual_cone();
        assert_eq!(d.generators(), &[qv(&[-1, 2]), qv(&[2, -1])]);
        assert_eq!(d.dual_cone(), c12());
        let o3 = OrderingCone::orthant(3);
        assert_eq!(o3.dual_cone().generators(), o3.generators());
        let built = OrderingCone::new(3, o3.generators().to_vec()).unwrap();
        assert_eq!(built.dual_generators(), o3.dual_generators());
    }

    #[test]
    fn strict_dual() {
        let o = OrderingCone::orthant(2);
        assert!(o.strict_dual_contains(&[1.0, 1.0]).unwrap());
        assert!(!o.strict_dual_contains(&[1.0, 0.0]).unwrap());
        assert!(!o.strict_dual_contains(&[-1.0, -2.0]).unwrap());
    }

    #[test]
    fn invalid_cones_rejected() {
        assert!(OrderingCone::new(2, vec![qv(&[1, 0]), qv(&[-1, 0])]).is_err());
        assert!(OrderingCone::new(2, vec![qv(&[1, 0])]).is_err());
        assert!(OrderingCone::new(2, vec![qv(&[0, 0]), qv(&[1, 0])]).is_err());
    }

    #[test]
    fn sphere_grid_plane() {
        let o = OrderingCone::orthant(2);
        let g = o.dual_sphere_grid(3, SphereNorm::Euclidean).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(g[0], vec![1.0, 0.0]);
        assert!((g[1][0] - h).abs() < 1e-15 && (g[1][1] - h).abs() < 1e-15);
        assert_eq!(g[2], vec![0.0, 1.0]);
        assert_eq!(o.dual_sphere_grid(2, SphereNorm::Euclidean).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(o.dual_sphere_grid(1, SphereNorm::Euclidean).is_err());
        let g = c12().dual_sphere_grid(2, SphereNorm::Euclidean).unwrap();
        let s5 = 5f64.sqrt();
        assert!((g[0][0] - 2.0 / s5).abs() < 1e-15 && (g[0][1] + 1.0 / s5).abs() < 1e-15);
        assert!((g[1][0] + 1.0 / s5).abs() < 1e-15 && (g[1][1] - 2.0 / s5).abs() < 1e-15);
        let g1 = o.dual_sphere_grid(5, SphereNorm::One).unwrap();
        assert!(g1.iter().all(|v| (v[0].abs() + v[1].abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sphere_grid_simplex() {
        let o = OrderingCone::orthant(3);
        let g = o.dual_sphere_grid(3, SphereNorm::Euclidean).unwrap();
        assert_eq!(g.len(), 6);
        for v in &g {
            assert!(o.dual_contains(v, 0.0));
            assert!((SphereNorm::Euclidean.norm(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_forms() {
        let o: OrderingCone = serde_json::from_str(r#"{"orthant": 2}"#).unwrap();
        assert!(o.is_orthant());
        let c: OrderingCone = serde_json::from_str(r#"{"dim": 2, "generators": [[1,2],["2","1"]]}"#).unwrap();
        assert_eq!(c, c12());
        assert_eq!(serde_json::to_string(&o).unwrap(), r#"{"orthant":2}"#);
    }
}
