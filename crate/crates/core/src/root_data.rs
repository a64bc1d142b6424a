//! Root data of a split reductive group: roots, Weyl group, ρ and the dotted action.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    identity, int_kernel, inverse_unimodular, mat_mul, mat_qvec, mat_vec, parse_rat, q, qdot, qv,
    rank, sign_normalize, to_weight, transpose, wneg, wsub, IMat, QVec, Rat, Weight,
};

pub const DEFAULT_WEYL_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    pub matrix: IMat,
    /// Contragredient action on coweights, `w^{-T}`.
    pub co_matrix: IMat,
    pub length: usize,
    /// A reduced word in the simple reflections.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RootDatum {
    pub rank: usize,
    pub pairing: Vec<QVec>,
    pub roots: Vec<Weight>,
    pub positive_roots: Vec<Weight>,
    pub simple_reflections: Vec<IMat>,
    /// `simple_roots[k]` is the positive root negated by `simple_reflections[k]`.
    pub simple_roots: Vec<Weight>,
    /// Elements of W; index 0 is the identity.
    pub weyl: Vec<WeylElement>,
    pub two_rho: Weight,
    pub w0: usize,
    /// Lattice basis of the invariant characters `M^W`.
    pub invariant_basis: Vec<Weight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dominance {
    Singular,
    Regular { w: usize, chi_plus: Weight, length: usize },
}

/// JSON form of a root datum.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RootDatumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Weight>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple_reflections: Option<Vec<IMat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_roots: Option<Vec<Weight>>,
}

impl RootDatumSpec {
    pub fn torus(rank: usize) -> Self {
        RootDatumSpec { builtin: Some("torus".into()), rank: Some(rank), ..Default::default() }
    }

    pub fn gl(n: usize) -> Self {
        RootDatumSpec { builtin: Some("gl".into()), n: Some(n), ..Default::default() }
    }

    pub fn build(&self) -> Result<RootDatum> {
        match self.builtin.as_deref() {
            Some("torus") => {
                let r = self.rank.ok_or_else(|| Error::InvalidInput("torus needs \"rank\"".into()))?;
                Ok(RootDatum::torus(r))
            }
            Some("gl") => {
                let n = self.n.or(self.rank).ok_or_else(|| Error::InvalidInput("gl needs \"n\"".into()))?;
                RootDatum::gl(n)
            }
            Some(other) => invalid(format!("unknown builtin '{other}'")),
            None => {
                let r = self.rank.ok_or_else(|| Error::InvalidInput("missing \"rank\"".into()))?;
                let pairing = match &self.pairing {
                    Some(p) => p
                        .iter()
                        .map(|row| row.iter().map(|s| parse_rat(s)).collect::<std::result::Result<QVec, _>>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(Error::InvalidInput)?,
                    None => (0..r).map(|i| (0..r).map(|j| q(i64::from(i == j))).collect()).collect(),
                };
                RootDatum::new(
                    r,
                    pairing,
                    self.roots.clone().unwrap_or_default(),
                    self.simple_reflections.clone().unwrap_or_default(),
                    self.positive_roots.clone(),
                    DEFAULT_WEYL_CAP,
                )
            }
        }
    }
}

fn lex_positive(v: &[i64]) -> bool {
    v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0)
}

fn det(m: &[QVec]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::from_integer(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in (c + 1)..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                let t = a[c][j] * f;
                a[i][j] -= t;
            }
        }
    }
    d
}

impl RootDatum {
    pub fn torus(rank: usize) -> Self {
        RootDatum::new(rank, (0..rank).map(|i| (0..rank).map(|j| q(i64::from(i == j))).collect()).collect(), vec![], vec![], None, DEFAULT_WEYL_CAP)
            .expect("torus root datum is valid")
    }

    /// `GL_n` with positive roots `e_i - e_j`, `i < j`, and the standard pairing.
    pub fn gl(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("gl needs n >= 1");
        }
        let e = |i: usize| -> Weight { (0..n).map(|k| i64::from(k == i)).collect() };
        let mut roots = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    roots.push(wsub(&e(i), &e(j)));
                }
            }
        }
        let refl: Vec<IMat> = (0..n.saturating_sub(1))
            .map(|k| {
                let mut m = identity(n);
                m.swap(k, k + 1);
                m
            })
            .collect();
        let positive: Vec<Weight> = roots.iter().filter(|r| lex_positive(r)).cloned().collect();
        let pairing = (0..n).map(|i| (0..n).map(|j| q(i64::from(i == j))).collect()).collect();
        RootDatum::new(n, pairing, roots, refl, Some(positive), DEFAULT_WEYL_CAP)
    }

    pub fn new(
        rank: usize,
        pairing: Vec<QVec>,
        roots: Vec<Weight>,
        simple_reflections: Vec<IMat>,
        positive_roots: Option<Vec<Weight>>,
        cap: usize,
    ) -> Result<Self> {
        if pairing.len() != rank || pairing.iter().any(|r| r.len() != rank) {
            return invalid("pairing must be a rank x rank matrix");
        }
        for i in 0..rank {
            for j in 0..rank {
                if pairing[i][j] != pairing[j][i] {
                    return invalid("pairing is not symmetric");
                }
            }
        }
        for k in 1..=rank {
            let minor: Vec<QVec> = pairing[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !det(&minor).is_positive() {
                return invalid("pairing is not positive definite");
            }
        }
        if roots.iter().any(|r| r.len() != rank || r.iter().all(|x| *x == 0)) {
            return invalid("roots must be nonzero vectors of length rank");
        }
        for s in &simple_reflections {
            if s.len() != rank || s.iter().any(|r| r.len() != rank) {
                return invalid("simple reflections must be rank x rank matrices");
            }
            if mat_mul(s, s) != identity(rank) {
                return invalid("a simple reflection is not an involution");
            }
            for r in &roots {
                if !roots.contains(&mat_vec(s, r)) {
                    return invalid("roots are not stable under a simple reflection");
                }
            }
            // w^T P w = P
            let sq: Vec<QVec> = s.iter().map(|r| qv(r)).collect();
            let st: Vec<QVec> = transpose(s).iter().map(|r| qv(r)).collect();
            for i in 0..rank {
                for j in 0..rank {
                    let mut acc = Rat::zero();
                    for a in 0..rank {
                        for b in 0..rank {
                            acc += st[i][a] * pairing[a][b] * sq[b][j];
                        }
                    }
                    if acc != pairing[i][j] {
                        return invalid("pairing is not invariant under a simple reflection");
                    }
                }
            }
        }
        for r in &roots {
            if !roots.contains(&wneg(r)) {
                return invalid("root system is not symmetric under negation");
            }
        }
        let positive_roots = match positive_roots {
            Some(p) => {
                for r in &p {
                    if !roots.contains(r) || p.contains(&wneg(r)) {
                        return invalid("positive roots must pick one of each pair ±α");
                    }
                }
                if 2 * p.len() != roots.len() {
                    return invalid("positive roots must pick one of each pair ±α");
                }
                p
            }
            None => roots.iter().filter(|r| lex_positive(r)).cloned().collect(),
        };
        let mut simple_roots = Vec::new();
        for s in &simple_reflections {
            let neg: Vec<&Weight> = positive_roots.iter().filter(|r| mat_vec(s, r) == wneg(r)).collect();
            if neg.len() != 1 {
                return invalid("each simple reflection must negate exactly one positive root");
            }
            simple_roots.push(neg[0].clone());
        }
        let mut dr = RootDatum {
            rank,
            pairing,
            roots,
            positive_roots,
            simple_reflections,
            simple_roots,
            weyl: vec![],
            two_rho: vec![0; rank],
            w0: 0,
            invariant_basis: vec![],
        };
        dr.two_rho = dr.positive_roots.iter().fold(vec![0; rank], |acc, r| crate::linalg::wadd(&acc, r));
        dr.enumerate_weyl(cap)?;
        let rows: Vec<Weight> = dr
            .simple_reflections
            .iter()
            .flat_map(|s| {
                let id = identity(rank);
                s.iter().zip(id).map(|(a, b)| wsub(a, &b)).collect::<Vec<_>>()
            })
            .collect();
        dr.invariant_basis = if rows.is_empty() {
            identity(rank)
        } else {
            let mut b: Vec<Weight> = int_kernel(&rows, rank).into_iter().map(|v| sign_normalize(&v).0).collect();
            b.sort();
            b
        };
        Ok(dr)
    }

    fn enumerate_weyl(&mut self, cap: usize) -> Result<()> {
        let n = self.rank;
        let mut seen: BTreeMap<IMat, usize> = BTreeMap::new();
        let mut elems: Vec<(IMat, Vec<usize>)> = vec![(identity(n), vec![])];
        seen.insert(identity(n), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (k, s) in self.simple_reflections.iter().enumerate() {
                let m = mat_mul(s, &elems[i].0);
                if !seen.contains_key(&m) {
                    if elems.len() >= cap {
                        return Err(Error::WeylGroupTooLarge(cap));
                    }
                    let mut word = vec![k];
                    word.extend(&elems[i].1);
                    seen.insert(m.clone(), elems.len());
                    elems.push((m, word));
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        let mut weyl = Vec::with_capacity(elems.len());
        for (m, word) in elems {
            let inv = inverse_unimodular(&m).ok_or_else(|| Error::InvalidInput("Weyl element is not unimodular".into()))?;
            let length = self.positive_roots.iter().filter(|r| !self.positive_roots.contains(&mat_vec(&m, r))).count();
            weyl.push(WeylElement { co_matrix: transpose(&inv), matrix: m, length, word });
        }
        let max = weyl.iter().map(|w| w.length).max().unwrap_or(0);
        let w0s: Vec<usize> = (0..weyl.len()).filter(|&i| weyl[i].length == max).collect();
        if w0s.len() != 1 {
            return invalid("no unique longest Weyl element; positive roots inconsistent with reflections");
        }
        if max != self.positive_roots.len() {
            return invalid("longest element does not invert every positive root");
        }
        self.w0 = w0s[0];
        self.weyl = weyl;
        Ok(())
    }

    pub fn is_torus(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    /// `ρ = two_rho / 2`.
    pub fn rho(&self) -> QVec {
        self.two_rho.iter().map(|&x| Rat::new(x as i128, 2)).collect()
    }

    /// Inner product `x^T P y`.
    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let py: QVec = self.pairing.iter().map(|row| qdot(row, y)).collect();
        qdot(x, &py)
    }

    pub fn is_dominant(&self, chi: &[i64]) -> bool {
        self.is_dominant_q(&qv(chi))
    }

    pub fn is_dominant_q(&self, x: &[Rat]) -> bool {
        self.positive_roots.iter().all(|a| !self.inner(x, &qv(a)).is_negative())
    }

    pub fn apply(&self, w: usize, chi: &[i64]) -> Weight {
        mat_vec(&self.weyl[w].matrix, chi)
    }

    pub fn apply_q(&self, w: usize, x: &[Rat]) -> QVec {
        mat_qvec(&self.weyl[w].matrix, x)
    }

    pub fn apply_co(&self, w: usize, lambda: &[i64]) -> Weight {
        mat_vec(&self.weyl[w].co_matrix, lambda)
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        let m = mat_mul(&self.weyl[a].matrix, &self.weyl[b].matrix);
        self.weyl.iter().position(|w| w.matrix == m).expect("W is closed under composition")
    }

    /// Dotted action `w∗χ = w(ρ+χ) − ρ`.
    pub fn dot_action(&self, w: usize, chi: &[i64]) -> Weight {
        let v: Weight = chi.iter().zip(&self.two_rho).map(|(c, r)| 2 * c + r).collect();
        let wv = mat_vec(&self.weyl[w].matrix, &v);
        wv.iter().zip(&self.two_rho).map(|(x, r)| (x - r) / 2).collect()
    }

    pub fn dominant_representative(&self, chi: &[i64]) -> Dominance {
        let v: QVec = chi.iter().zip(&self.two_rho).map(|(&c, &r)| q(2 * c + r)).collect();
        if self.roots.iter().any(|a| self.inner(&v, &qv(a)).is_zero()) {
            return Dominance::Singular;
        }
        for (i, w) in self.weyl.iter().enumerate() {
            let wv = mat_qvec(&w.matrix, &v);
            if self.positive_roots.iter().all(|a| self.inner(&wv, &qv(a)).is_positive()) {
                return Dominance::Regular { w: i, chi_plus: self.dot_action(i, chi), length: w.length };
            }
        }
        unreachable!("a regular point has a strictly dominant W-translate")
    }

    /// Bott's straightening by simple reflections; returns `(χ⁺, ℓ)` or `None` if singular.
    pub fn straighten(&self, chi: &[i64]) -> Option<(Weight, usize)> {
        let mut v: Weight = chi.iter().zip(&self.two_rho).map(|(c, r)| 2 * c + r).collect();
        let mut steps = 0;
        loop {
            let vq = qv(&v);
            if self.roots.iter().any(|a| self.inner(&vq, &qv(a)).is_zero()) {
                return None;
            }
            match self.simple_roots.iter().position(|a| self.inner(&vq, &qv(a)).is_negative()) {
                Some(k) => {
                    v = mat_vec(&self.simple_reflections[k], &v);
                    steps += 1;
                }
                None => {
                    let chi_plus = v.iter().zip(&self.two_rho).map(|(x, r)| (x - r) / 2).collect();
                    return Some((chi_plus, steps));
                }
            }
        }
    }

    /// Whether a rational point is fixed by every Weyl element.
    pub fn is_invariant(&self, x: &[Rat]) -> bool {
        self.weyl.iter().all(|w| mat_qvec(&w.matrix, x) == x)
    }

    /// Coordinates of an invariant point in `invariant_basis`.
    pub fn invariant_coords(&self, x: &[Rat]) -> Option<QVec> {
        let k = self.invariant_basis.len();
        let rows: Vec<QVec> = (0..self.rank)
            .map(|i| {
                let mut r: QVec = self.invariant_basis.iter().map(|b| q(b[i])).collect();
                r.push(x[i]);
                r
            })
            .collect();
        let (m, piv) = crate::linalg::rref(&rows);
        if piv.contains(&k) {
            return None;
        }
        let mut t = vec![Rat::zero(); k];
        for (row, p) in m.iter().zip(piv) {
            t[p] = row[k];
        }
        Some(t)
    }

    pub fn from_invariant_coords(&self, t: &[Rat]) -> QVec {
        (0..self.rank)
            .map(|i| t.iter().zip(&self.invariant_basis).fold(Rat::zero(), |acc, (ti, b)| acc + ti * q(b[i])))
            .collect()
    }

    pub fn invariant_rank(&self) -> usize {
        let q: Vec<QVec> = self.invariant_basis.iter().map(|b| qv(b)).collect();
        rank(&q)
    }

    pub fn spec(&self) -> RootDatumSpec {
        RootDatumSpec {
            builtin: None,
            rank: Some(self.rank),
            n: None,
            pairing: Some(self.pairing.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()),
            roots: Some(self.roots.clone()),
            simple_reflections: Some(self.simple_reflections.clone()),
            positive_roots: Some(self.positive_roots.clone()),
        }
    }
}

pub fn weight_from_q(v: &[Rat]) -> Option<Weight> {
    to_weight(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gl2() -> RootDatum {
        RootDatum::gl(2).unwrap()
    }

    #[test]
    fn gl2_basics() {
        let g = gl2();
        assert_eq!(g.positive_roots, vec![vec![1, -1]]);
        assert_eq!(g.rho(), vec![Rat::new(1, 2), Rat::new(-1, 2)]);
        assert_eq!(g.weyl_order(), 2);
        assert_eq!(g.weyl[g.w0].length, 1);
        assert_eq!(g.weyl[g.w0].matrix, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(g.invariant_basis, vec![vec![1, 1]]);
        assert!(g.is_dominant(&[2, 1]));
        assert!(!g.is_dominant(&[1, 2]));
    }

    #[test]
    fn dominant_representative_examples() {
        let t = RootDatum::torus(1);
        assert_eq!(t.dominant_representative(&[5]), Dominance::Regular { w: 0, chi_plus: vec![5], length: 0 });
        let g = gl2();
        assert_eq!(g.dominant_representative(&[-1, 0]), Dominance::Singular);
        assert_eq!(g.dominant_representative(&[0, 2]), Dominance::Regular { w: g.w0, chi_plus: vec![1, 1], length: 1 });
        assert_eq!(g.apply(g.w0, &[3, 1]), vec![1, 3]);
        assert_eq!(g.apply(0, &[3, 1]), vec![3, 1]);
    }

    #[test]
    fn gl3_group() {
        let g = RootDatum::gl(3).unwrap();
        assert_eq!(g.weyl_order(), 6);
        assert_eq!(g.weyl[g.w0].length, 3);
        assert_eq!(g.two_rho, vec![2, 0, -2]);
        let lengths: Vec<usize> = g.weyl.iter().map(|w| w.length).collect();
        let mut sorted = lengths.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 1, 2, 2, 3]);
        for w in &g.weyl {
            assert_eq!(w.word.len(), w.length);
        }
    }

    #[test]
    fn json_root_datum_roundtrip() {
        let spec: RootDatumSpec = serde_json::from_str(
            r#"{"rank":2,"pairing":[["1","0"],["0","1"]],"roots":[[1,-1],[-1,1]],"simple_reflections":[[[0,1],[1,0]]]}"#,
        )
        .unwrap();
        let d = spec.build().unwrap();
        assert_eq!(d.positive_roots, vec![vec![1, -1]]);
        assert_eq!(d.weyl_order(), 2);
        let bad: RootDatumSpec = serde_json::from_str(r#"{"rank":1,"pairing":[["-1"]]}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn weyl_cap_is_enforced() {
        let g = RootDatum::gl(4).unwrap();
        let r = RootDatum::new(4, g.pairing.clone(), g.roots.clone(), g.simple_reflections.clone(), None, 10);
        assert_eq!(r.unwrap_err(), Error::WeylGroupTooLarge(10));
    }

    proptest! {
        #[test]
        fn dominant_rep_matches_straightening(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
            let g = RootDatum::gl(3).unwrap();
            let chi = vec![a, b, c];
            match g.dominant_representative(&chi) {
                Dominance::Singular => prop_assert!(g.straighten(&chi).is_none()),
                Dominance::Regular { w, chi_plus, length } => {
                    prop_assert!(g.is_dominant(&chi_plus));
                    prop_assert_eq!(g.dot_action(w, &chi), chi_plus.clone());
                    prop_assert_eq!(g.straighten(&chi), Some((chi_plus, length)));
                }
            }
        }

        #[test]
        fn dotted_action_is_an_action(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
            let g = RootDatum::gl(3).unwrap();
            let chi = vec![a, b, c];
            for i in 0..g.weyl_order() {
                for j in 0..g.weyl_order() {
                    let lhs = g.dot_action(i, &g.dot_action(j, &chi));
                    prop_assert_eq!(lhs, g.dot_action(g.compose(i, j), &chi));
                }
                let singular = g.dominant_representative(&chi) == Dominance::Singular;
                let moved = g.dominant_representative(&g.dot_action(i, &chi)) == Dominance::Singular;
                prop_assert_eq!(singular, moved);
            }
        }
    }
}
