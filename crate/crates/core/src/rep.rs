//! Quasi-symmetric representations: validity, the polytopes Σ and ∇, η_λ and genericity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{zonotope, HalfSpace, Polytope};
use crate::linalg::{
    dot, lattice_index, mat_vec, normal_of, primitive, primitive_i, q, qdot, qscale, qv, rank_i,
    sign_normalize, subsets, wneg, QVec, Rat, Weight,
};
use crate::root_data::{RootDatum, RootDatumSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepSpec {
    pub root_datum: RootDatumSpec,
    pub weights: Vec<Weight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assert_generic: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct QSRep {
    pub root_datum: RootDatum,
    /// β₁..β_d; the index carries identity.
    pub weights: Vec<Weight>,
    pub sigma: Polytope,
    pub half_sigma: Polytope,
    pub nabla: Polytope,
    pub spans: bool,
    pub quasi_symmetric: bool,
    pub generic: Ternary,
    pub symplectic: bool,
}

/// Whether each line through the origin carries weights summing to zero.
pub fn check_quasi_symmetric(weights: &[Weight]) -> bool {
    let mut lines: BTreeMap<Weight, Weight> = BTreeMap::new();
    for w in weights {
        if w.iter().all(|x| *x == 0) {
            continue;
        }
        let (dir, _) = sign_normalize(&primitive_i(w));
        let e = lines.entry(dir).or_insert_with(|| vec![0; w.len()]);
        *e = crate::linalg::wadd(e, w);
    }
    lines.values().all(|s| s.iter().all(|x| *x == 0))
}

pub fn is_symplectic(weights: &[Weight]) -> bool {
    let mut a: Vec<Weight> = weights.to_vec();
    let mut b: Vec<Weight> = weights.iter().map(|w| wneg(w)).collect();
    a.sort();
    b.sort();
    a == b
}

/// Half-spaces `<x, Pα> >= 0` cutting out the dominant cone.
pub fn dominant_halfspaces(rd: &RootDatum) -> Vec<HalfSpace> {
    rd.positive_roots
        .iter()
        .map(|a| {
            let pa: QVec = rd.pairing.iter().map(|row| qdot(row, &qv(a))).collect();
            HalfSpace::new(primitive(&pa), Rat::zero())
        })
        .collect()
}

/// Primitive normals of hyperplanes spanned by `n-1` of the given vectors, both signs.
fn candidate_normals(vectors: &[Weight], n: usize) -> BTreeSet<Weight> {
    let mut dirs: BTreeSet<Weight> = BTreeSet::new();
    for v in vectors {
        if v.iter().any(|x| *x != 0) {
            dirs.insert(sign_normalize(&primitive_i(v)).0);
        }
    }
    let dirs: Vec<Weight> = dirs.into_iter().collect();
    let mut out = BTreeSet::new();
    if n == 0 {
        return out;
    }
    for sub in subsets(dirs.len(), n - 1) {
        let rows: Vec<QVec> = sub.iter().map(|&i| qv(&dirs[i])).collect();
        if let Some(l) = normal_of(&rows, n) {
            out.insert(wneg(&l));
            out.insert(l);
        }
    }
    out
}

impl RepSpec {
    pub fn build(&self) -> Result<QSRep> {
        let rd = self.root_datum.build()?;
        QSRep::new(rd, self.weights.clone(), self.assert_generic.unwrap_or(false))
    }
}

impl QSRep {
    pub fn new(root_datum: RootDatum, weights: Vec<Weight>, assert_generic: bool) -> Result<QSRep> {
        let n = root_datum.rank;
        if weights.is_empty() {
            return invalid("no weights");
        }
        if weights.iter().any(|w| w.len() != n) {
            return invalid(format!("weights must have length {n}"));
        }
        if !check_quasi_symmetric(&weights) {
            return Err(Error::NotQuasiSymmetric);
        }
        let mut sorted = weights.clone();
        sorted.sort();
        for s in &root_datum.simple_reflections {
            let mut img: Vec<Weight> = weights.iter().map(|w| mat_vec(s, w)).collect();
            img.sort();
            if img != sorted {
                return Err(Error::NotWeylInvariant);
            }
        }
        let spans = rank_i(&weights) == n;
        if !spans {
            return Err(Error::DoesNotSpan);
        }
        let sigma = zonotope(&weights, q(1))?;
        let half_sigma = zonotope(&weights, Rat::new(1, 2))?;
        let mut rep = QSRep {
            symplectic: is_symplectic(&weights),
            root_datum,
            weights,
            sigma,
            half_sigma,
            nabla: Polytope { ambient: n, equations: vec![], halfspaces: vec![], vertices: vec![], center: None },
            spans,
            quasi_symmetric: true,
            generic: Ternary::Unknown,
        };
        rep.nabla = rep.build_nabla()?;
        rep.generic = if rep.root_datum.is_torus() {
            rep.check_generic_torus()
        } else if assert_generic {
            Ternary::Yes
        } else {
            Ternary::Unknown
        };
        Ok(rep)
    }

    pub fn from_torus(weights: Vec<Weight>) -> Result<QSRep> {
        let n = weights.first().map_or(0, |w| w.len());
        QSRep::new(RootDatum::torus(n), weights, false)
    }

    pub fn rank(&self) -> usize {
        self.root_datum.rank
    }

    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn eta(&self, lambda: &[i64]) -> Result<i64> {
        if lambda.iter().all(|x| *x == 0) {
            return invalid("eta needs a nonzero coweight");
        }
        let x: i64 = self.weights.iter().map(|b| (-dot(b, lambda)).max(0)).sum();
        let g: i64 = self.root_datum.roots.iter().map(|a| dot(a, lambda).max(0)).sum();
        Ok(x - g)
    }

    fn build_nabla(&self) -> Result<Polytope> {
        let n = self.rank();
        let mut vectors = self.weights.clone();
        vectors.extend(self.root_datum.roots.iter().cloned());
        let mut hs = Vec::new();
        for l in candidate_normals(&vectors, n) {
            let eta = self.eta(&l)?;
            hs.push(HalfSpace::new(l, Rat::new(-(eta as i128), 2)));
        }
        let mut nabla = Polytope::from_constraints(n, vec![], hs);
        if nabla.is_empty() || nabla.dim() != n {
            return Err(Error::Inconsistent("∇ is not full-dimensional".into()));
        }
        nabla.center = Some(vec![Rat::zero(); n]);
        self.check_nabla(&nabla)?;
        Ok(nabla)
    }

    /// Dominant slices of ∇ and of `-ρ + ½Σ` agree, and ∇ is the union of the W-translates of that slice.
    pub fn cross_check_nabla(&self) -> Result<()> {
        self.check_nabla(&self.nabla)
    }

    fn check_nabla(&self, nabla: &Polytope) -> Result<()> {
        let rd = &self.root_datum;
        let cone = dominant_halfspaces(rd);
        let rho = rd.rho();
        let shifted = self.half_sigma.translate(&qscale(&rho, q(-1)));
        let a = nabla.intersect(&cone);
        let b = shifted.intersect(&cone);
        if !a.same_set(&b) {
            return Err(Error::Inconsistent("∇ ∩ M⁺ differs from (−ρ+½Σ) ∩ M⁺".into()));
        }
        let pieces: Vec<Vec<QVec>> = (0..rd.weyl_order()).map(|w| a.vertices.iter().map(|v| rd.apply_q(w, v)).collect()).collect();
        for piece in &pieces {
            if piece.iter().any(|v| !nabla.contains(v)) {
                return Err(Error::Inconsistent("a W-translate of the dominant slice leaves ∇".into()));
            }
        }
        for v in &nabla.vertices {
            let dominant_translate = (0..rd.weyl_order()).map(|w| rd.apply_q(w, v)).find(|x| rd.is_dominant_q(x));
            match dominant_translate {
                Some(x) if a.contains(&x) => {}
                _ => return Err(Error::Inconsistent("a vertex of ∇ is outside the W-orbit of the dominant slice".into())),
            }
        }
        let lat: Vec<Weight> = nabla.lattice_points(None);
        let slice_pts: BTreeSet<Weight> = a.lattice_points(None).into_iter().collect();
        for m in &lat {
            if !(0..rd.weyl_order()).any(|w| slice_pts.contains(&rd.apply(w, m))) {
                return Err(Error::Inconsistent("a lattice point of ∇ is not a W-translate of the slice".into()));
            }
        }
        Ok(())
    }

    fn check_generic_torus(&self) -> Ternary {
        let n = self.rank();
        for i in 0..self.d() {
            let others: Vec<Weight> = self.weights.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| w.clone()).collect();
            if lattice_index(&others, n) != Some(1) {
                return Ternary::No;
            }
            if !zero_in_interior_of_hull(&others, n) {
                return Ternary::No;
            }
        }
        Ternary::Yes
    }

    /// Indices partitioned by the sign of `<β_i, λ>`.
    pub fn sign_pattern(&self, lambda: &[i64]) -> Vec<i64> {
        self.weights.iter().map(|b| dot(b, lambda).signum()).collect()
    }

    /// Normals of the facets of Σ (the hyperplane family 𝒜 up to translation).
    pub fn sigma_normals(&self) -> Vec<Weight> {
        self.sigma.halfspaces.iter().map(|h| h.normal.clone()).collect()
    }

    pub fn spec(&self) -> RepSpec {
        RepSpec { root_datum: self.root_datum.spec(), weights: self.weights.clone(), assert_generic: None }
    }
}

/// `0` is interior to `conv(S)` iff no nonzero covector is nonnegative on all of `S`.
pub fn zero_in_interior_of_hull(s: &[Weight], n: usize) -> bool {
    if rank_i(s) < n {
        return false;
    }
    candidate_normals(s, n)
        .iter()
        .all(|l| s.iter().any(|v| dot(v, l) < 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn gl2_sym3() -> QSRep {
        let w = vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3], vec![-3, 0], vec![-2, -1], vec![-1, -2], vec![0, -3]];
        QSRep::new(RootDatum::gl(2).unwrap(), w, false).unwrap()
    }

    #[test]
    fn quasi_symmetry_examples() {
        assert!(check_quasi_symmetric(&[vec![1], vec![1], vec![-1], vec![-1]]));
        assert!(!check_quasi_symmetric(&[vec![1], vec![1], vec![-1]]));
        assert!(check_quasi_symmetric(&gl2_sym3().weights));
        assert!(check_quasi_symmetric(&[vec![2], vec![-1], vec![-1], vec![0]]));
        assert_eq!(QSRep::from_torus(vec![vec![1], vec![1], vec![-1]]).unwrap_err(), Error::NotQuasiSymmetric);
    }

    #[test]
    fn eta_examples() {
        let t = QSRep::from_torus(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        assert_eq!(t.eta(&[1]).unwrap(), 2);
        assert_eq!(t.eta(&[-1]).unwrap(), 2);
        assert!(t.eta(&[0]).is_err());
        assert_eq!(gl2_sym3().eta(&[1, 1]).unwrap(), 12);
    }

    #[test]
    fn nabla_examples() {
        let t = QSRep::from_torus(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        assert_eq!(t.nabla.vertices, vec![vec![q(-1)], vec![q(1)]]);
        let t = QSRep::from_torus(vec![vec![1], vec![1], vec![1], vec![-1], vec![-1], vec![-1]]).unwrap();
        assert_eq!(t.nabla.vertices, vec![vec![Rat::new(-3, 2)], vec![Rat::new(3, 2)]]);
    }

    #[test]
    fn gl2_nabla_is_weyl_invariant() {
        let g = gl2_sym3();
        let rd = &g.root_datum;
        for v in &g.nabla.vertices {
            assert!(g.nabla.vertices.contains(&rd.apply_q(rd.w0, v)));
        }
        assert_eq!(g.nabla.dim(), 2);
    }

    #[test]
    fn genericity_and_symplecticity() {
        let t = QSRep::from_torus(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        assert_eq!(t.generic, Ternary::Yes);
        let t = QSRep::from_torus(vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(t.generic, Ternary::No);
        assert!(t.symplectic);
        let g = gl2_sym3();
        assert_eq!(g.generic, Ternary::Unknown);
        assert!(g.symplectic);
        let g = QSRep::new(RootDatum::gl(2).unwrap(), g.weights.clone(), true).unwrap();
        assert_eq!(g.generic, Ternary::Yes);
        assert!(!is_symplectic(&[vec![1], vec![1], vec![-1]]));
        let t = QSRep::from_torus(vec![vec![2], vec![2], vec![-2], vec![-2]]).unwrap();
        assert_eq!(t.generic, Ternary::No);
    }

    #[test]
    fn json_input() {
        let spec: RepSpec = serde_json::from_str(r#"{"root_datum":{"builtin":"torus","rank":1},"weights":[[1],[1],[-1],[-1]]}"#).unwrap();
        let r = spec.build().unwrap();
        assert_eq!(r.d(), 4);
        let spec: RepSpec = serde_json::from_str(r#"{"root_datum":{"builtin":"gl","n":2},"weights":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(spec.build().unwrap_err(), Error::NotQuasiSymmetric);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn eta_symmetry_and_torus_nabla(lines in proptest::collection::vec((proptest::collection::vec(-2i64..=2, 2), 1i64..3), 2..4), l in proptest::collection::vec(-3i64..=3, 2)) {
            let mut ws = Vec::new();
            for (v, k) in &lines {
                if v.iter().all(|x| *x == 0) { continue; }
                for _ in 0..*k { ws.push(v.clone()); ws.push(wneg(v)); }
            }
            prop_assume!(!ws.is_empty() && rank_i(&ws) == 2);
            let r = QSRep::from_torus(ws.clone()).unwrap();
            if l.iter().any(|x| *x != 0) {
                let a: i64 = ws.iter().map(|b| (-dot(b, &l)).max(0)).sum();
                let b: i64 = ws.iter().map(|b| dot(b, &l).max(0)).sum();
                prop_assert_eq!(a, b);
            }
            prop_assert!(r.nabla.same_set(&r.half_sigma));
        }
    }
}
