//! Exact two-phase simplex (dense tableau, Bland's rule) with a strong-duality self-check.
//!
//! Problems are always minimizations. Dual signs follow the convention
//! `max bᵀu` with `u ≤ 0` on `≤` rows, `u ≥ 0` on `≥` rows, free on equalities.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rational::{dot, unwrap_mat, unwrap_vec, wrap_mat, wrap_vec, QVec, Rat, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Free,
    NonNeg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: QVec,
    pub rows: Vec<QVec>,
    pub senses: Vec<Sense>,
    pub rhs: QVec,
    pub vars: Vec<VarKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Q,
    pub x: QVec,
    pub duals: QVec,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// All-free minimization of `objective` subject to `rows · x ≤ rhs`.
    pub fn free_le(objective: QVec, rows: Vec<QVec>, rhs: QVec) -> Self {
        let n = objective.len();
        let m = rows.len();
        LinearProgram { objective, rows, senses: vec![Sense::Le; m], rhs, vars: vec![VarKind::Free; n] }
    }

    pub fn push_row(&mut self, row: QVec, sense: Sense, rhs: Q) {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        check_dim(n, self.vars.len())?;
        check_dim(self.rows.len(), self.senses.len())?;
        check_dim(self.rows.len(), self.rhs.len())?;
        for r in &self.rows {
            check_dim(n, r.len())?;
        }
        Ok(())
    }

    /// Exact dual-feasibility and zero-gap check for a claimed optimum.
    pub fn verify_duality(&self, sol: &LpSolution) -> Result<()> {
        let fail = |what: &str| Err(Error::Duality(what.to_string()));
        for (u, s) in sol.duals.iter().zip(&self.senses) {
            let ok = match s {
                Sense::Le => !u.is_positive(),
                Sense::Ge => !u.is_negative(),
                Sense::Eq => true,
            };
            if !ok {
                return fail("dual sign");
            }
        }
        for j in 0..self.objective.len() {
            let aty = self.rows.iter().zip(&sol.duals).fold(Q::zero(), |acc, (r, u)| acc + &r[j] * u);
            let red = &self.objective[j] - aty;
            let ok = match self.vars[j] {
                VarKind::NonNeg => !red.is_negative(),
                VarKind::Free => red.is_zero(),
            };
            if !ok {
                return fail("dual feasibility");
            }
        }
        for ((r, s), b) in self.rows.iter().zip(&self.senses).zip(&self.rhs) {
            let ax = dot(r, &sol.x);
            let ok = match s {
                Sense::Le => ax <= *b,
                Sense::Ge => ax >= *b,
                Sense::Eq => ax == *b,
            };
            if !ok {
                return fail("primal feasibility");
            }
        }
        if dot(&self.rhs, &sol.duals) != sol.value || dot(&self.objective, &sol.x) != sol.value {
            return fail("duality gap");
        }
        Ok(())
    }
}

struct Tableau {
    t: Vec<QVec>,
    basis: Vec<usize>,
    d: QVec,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !self.d[c].is_zero() {
            let f = self.d[c].clone();
            for (v, pv) in self.d.iter_mut().zip(&prow[..self.width]) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reset_costs(&mut self, cost: &[Q]) {
        self.d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                for j in 0..self.width {
                    let t = &cost[b] * &self.t[i][j];
                    self.d[j] -= t;
                }
            }
        }
    }

    /// Runs Bland's rule over columns `< allowed`; `false` on unboundedness.
    fn run(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.d[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = self.rhs(i) / &self.t[i][c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.objective.len();
    let m = lp.rows.len();
    let mut col_of = Vec::with_capacity(n);
    let mut nstruct = 0;
    for v in &lp.vars {
        match v {
            VarKind::NonNeg => {
                col_of.push((nstruct, None));
                nstruct += 1;
            }
            VarKind::Free => {
                col_of.push((nstruct, Some(nstruct + 1)));
                nstruct += 2;
            }
        }
    }
    let nslack = lp.senses.iter().filter(|s| **s != Sense::Eq).count();
    let art0 = nstruct + nslack;
    let width = art0 + m;
    let mut flips = Vec::with_capacity(m);
    let mut t = Vec::with_capacity(m);
    let mut slack = nstruct;
    for i in 0..m {
        let mut row = vec![Q::zero(); width + 1];
        for (j, &(p, neg)) in col_of.iter().enumerate() {
            row[p] = lp.rows[i][j].clone();
            if let Some(nc) = neg {
                row[nc] = -lp.rows[i][j].clone();
            }
        }
        match lp.senses[i] {
            Sense::Le => {
                row[slack] = Q::from_integer(1.into());
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = Q::from_integer((-1).into());
                slack += 1;
            }
            Sense::Eq => {}
        }
        row[width] = lp.rhs[i].clone();
        let flip = lp.rhs[i].is_negative();
        if flip {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art0 + i] = Q::from_integer(1.into());
        flips.push(flip);
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (art0..art0 + m).collect(), d: vec![], width };

    let mut c1 = vec![Q::zero(); width];
    for c in c1.iter_mut().skip(art0) {
        *c = Q::from_integer(1.into());
    }
    tab.reset_costs(&c1);
    tab.run(width);
    let infeas = (0..m).fold(Q::zero(), |acc, i| acc + &c1[tab.basis[i]] * tab.rhs(i));
    if infeas.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    let mut c2 = vec![Q::zero(); width];
    for (j, &(p, neg)) in col_of.iter().enumerate() {
        c2[p] = lp.objective[j].clone();
        if let Some(nc) = neg {
            c2[nc] = -lp.objective[j].clone();
        }
    }
    tab.reset_costs(&c2);
    if !tab.run(art0) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut sv = vec![Q::zero(); width];
    for (i, &b) in tab.basis.iter().enumerate() {
        sv[b] = tab.rhs(i).clone();
    }
    let x: QVec = col_of
        .iter()
        .map(|&(p, neg)| match neg {
            Some(nc) => &sv[p] - &sv[nc],
            None => sv[p].clone(),
        })
        .collect();
    let duals: QVec = (0..m)
        .map(|k| {
            let y = (0..m).fold(Q::zero(), |acc, r| acc + &c2[tab.basis[r]] * &tab.t[r][art0 + k]);
            if flips[k] {
                -y
            } else {
                y
            }
        })
        .collect();
    let value = dot(&lp.objective, &x);
    let sol = LpSolution { value, x, duals };
    lp.verify_duality(&sol)?;
    Ok(LpOutcome::Optimal(sol))
}

/// Whether `{x : rows·x ≤ rhs}` (all variables free) is nonempty.
pub fn feasible_le(rows: &[QVec], rhs: &[Q], n: usize) -> Result<Option<QVec>> {
    let lp = LinearProgram::free_le(vec![Q::zero(); n], rows.to_vec(), rhs.to_vec());
    Ok(match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => Some(s.x),
        _ => None,
    })
}

#[derive(Serialize, Deserialize)]
struct LpJson {
    objective: Vec<Rat>,
    rows: Vec<Vec<Rat>>,
    senses: Vec<Sense>,
    rhs: Vec<Rat>,
    #[serde(default)]
    vars: Option<Vec<VarKind>>,
}

impl Serialize for LinearProgram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LpJson {
            objective: wrap_vec(&self.objective),
            rows: wrap_mat(&self.rows),
            senses: self.senses.clone(),
            rhs: wrap_vec(&self.rhs),
            vars: Some(self.vars.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearProgram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LpJson::deserialize(d)?;
        let n = j.objective.len();
        let lp = LinearProgram {
            objective: unwrap_vec(&j.objective),
            rows: unwrap_mat(&j.rows),
            senses: j.senses,
            rhs: unwrap_vec(&j.rhs),
            vars: j.vars.unwrap_or_else(|| vec![VarKind::Free; n]),
        };
        lp.validate().map_err(serde::de::Error::custom)?;
        Ok(lp)
    }
}
