//! Exact rational polytopes in H- and V-representation, their faces and lattice points.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    ceil, floor, int_kernel, primitive_i, q, qadd, qdot_i, qscale, qsub, qv, rank, rref, solve,
    subsets, QVec, Rat, Weight,
};

/// `{x : <x, normal> >= offset}` with a primitive integral normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSpace {
    pub normal: Weight,
    pub offset: Rat,
}

impl HalfSpace {
    pub fn new(normal: Weight, offset: Rat) -> Self {
        let g = normal.iter().fold(0i64, |acc, x| num_integer::gcd(acc, *x));
        assert!(g != 0, "half-space normal must be nonzero");
        HalfSpace { normal: normal.iter().map(|x| x / g).collect(), offset: offset / q(g) }
    }

    pub fn value(&self, x: &[Rat]) -> Rat {
        qdot_i(x, &self.normal)
    }

    pub fn slack(&self, x: &[Rat]) -> Rat {
        self.value(x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    pub ambient: usize,
    /// Affine hull as `<x, normal> = offset`.
    pub equations: Vec<HalfSpace>,
    pub halfspaces: Vec<HalfSpace>,
    /// Sorted vertex list.
    pub vertices: Vec<QVec>,
    pub center: Option<QVec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub facet_indices: Vec<usize>,
    pub codim: usize,
    pub sample: QVec,
    pub affine_span: Vec<QVec>,
    pub vertex_indices: Vec<usize>,
}

fn affine_dim(points: &[&QVec]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            let diffs: Vec<QVec> = rest.iter().map(|p| qsub(p, p0)).collect();
            rank(&diffs)
        }
    }
}

fn affine_basis(points: &[&QVec]) -> Vec<QVec> {
    match points.split_first() {
        None => vec![],
        Some((p0, rest)) => {
            let diffs: Vec<QVec> = rest.iter().map(|p| qsub(p, p0)).collect();
            rref(&diffs).0
        }
    }
}

fn centroid(points: &[&QVec], n: usize) -> QVec {
    let mut s = vec![Rat::zero(); n];
    for p in points {
        s = qadd(&s, p);
    }
    qscale(&s, Rat::new(1, points.len().max(1) as i128))
}

/// Vertices of `{equations, halfspaces}` by solving every square subsystem.
pub fn enumerate_vertices(n: usize, equations: &[HalfSpace], halfspaces: &[HalfSpace]) -> Vec<QVec> {
    let eq_rows: Vec<QVec> = equations.iter().map(|h| qv(&h.normal)).collect();
    let (_, eq_piv) = rref(&eq_rows.iter().map(|r| r.clone()).collect::<Vec<_>>());
    let e = eq_piv.len();
    // independent subset of the equations
    let mut eqs: Vec<&HalfSpace> = Vec::new();
    let mut acc: Vec<QVec> = Vec::new();
    for h in equations {
        let mut t = acc.clone();
        t.push(qv(&h.normal));
        if rank(&t) > acc.len() {
            acc = t;
            eqs.push(h);
        }
    }
    debug_assert_eq!(eqs.len(), e);
    let k = n - e;
    let mut out = BTreeSet::new();
    let feasible = |x: &QVec| {
        equations.iter().all(|h| h.value(x) == h.offset) && halfspaces.iter().all(|h| !h.slack(x).is_negative())
    };
    if k == 0 {
        let a: Vec<QVec> = eqs.iter().map(|h| qv(&h.normal)).collect();
        let b: QVec = eqs.iter().map(|h| h.offset).collect();
        if let Some(x) = solve(&a, &b) {
            if feasible(&x) {
                out.insert(x);
            }
        }
        return out.into_iter().collect();
    }
    for sub in subsets(halfspaces.len(), k) {
        let mut a: Vec<QVec> = eqs.iter().map(|h| qv(&h.normal)).collect();
        let mut b: QVec = eqs.iter().map(|h| h.offset).collect();
        for &i in &sub {
            a.push(qv(&halfspaces[i].normal));
            b.push(halfspaces[i].offset);
        }
        if let Some(x) = solve(&a, &b) {
            if !out.contains(&x) && feasible(&x) {
                out.insert(x);
            }
        }
    }
    out.into_iter().collect()
}

impl Polytope {
    /// Builds a bounded polytope, removing redundant inequalities and sorting the rest.
    pub fn from_constraints(n: usize, equations: Vec<HalfSpace>, halfspaces: Vec<HalfSpace>) -> Polytope {
        let mut hs: Vec<HalfSpace> = halfspaces.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        // keep the tightest offset per normal
        let mut best: BTreeMap<Weight, Rat> = BTreeMap::new();
        for h in hs.drain(..) {
            let e = best.entry(h.normal.clone()).or_insert(h.offset);
            if h.offset > *e {
                *e = h.offset;
            }
        }
        let hs: Vec<HalfSpace> = best.into_iter().map(|(normal, offset)| HalfSpace { normal, offset }).collect();
        let vertices = enumerate_vertices(n, &equations, &hs);
        let mut p = Polytope { ambient: n, equations, halfspaces: hs, vertices, center: None };
        p.prune();
        p
    }

    fn prune(&mut self) {
        let d = self.dim();
        if self.vertices.is_empty() {
            return;
        }
        let verts = &self.vertices;
        let keep: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .filter(|h| {
                let tight: Vec<&QVec> = verts.iter().filter(|v| h.slack(v).is_zero()).collect();
                d >= 1 && !tight.is_empty() && tight.len() < verts.len() && affine_dim(&tight) + 1 == d
            })
            .cloned()
            .collect();
        self.halfspaces = keep;
    }

    pub fn dim(&self) -> usize {
        let v: Vec<&QVec> = self.vertices.iter().collect();
        affine_dim(&v)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|h| h.value(x) == h.offset) && self.halfspaces.iter().all(|h| !h.slack(x).is_negative())
    }

    /// In the relative interior.
    pub fn contains_strictly(&self, x: &[Rat]) -> bool {
        self.equations.iter().all(|h| h.value(x) == h.offset) && self.halfspaces.iter().all(|h| h.slack(x).is_positive())
    }

    pub fn on_boundary(&self, x: &[Rat]) -> bool {
        self.contains(x) && self.halfspaces.iter().any(|h| h.slack(x).is_zero())
    }

    /// Indices of the facets tight at `x`.
    pub fn tight_set(&self, x: &[Rat]) -> Vec<usize> {
        (0..self.halfspaces.len()).filter(|&i| self.halfspaces[i].slack(x).is_zero()).collect()
    }

    pub fn translate(&self, v: &[Rat]) -> Polytope {
        let shift = |h: &HalfSpace| HalfSpace { normal: h.normal.clone(), offset: h.offset + h.value(v) };
        Polytope {
            ambient: self.ambient,
            equations: self.equations.iter().map(shift).collect(),
            halfspaces: self.halfspaces.iter().map(shift).collect(),
            vertices: self.vertices.iter().map(|x| qadd(x, v)).collect(),
            center: self.center.as_ref().map(|c| qadd(c, v)),
        }
    }

    /// Adds constraints and recomputes vertices; facet order is recomputed too.
    pub fn intersect(&self, extra: &[HalfSpace]) -> Polytope {
        let mut hs = self.halfspaces.clone();
        hs.extend(extra.iter().cloned());
        Polytope::from_constraints(self.ambient, self.equations.clone(), hs)
    }

    pub fn bounding_box(&self) -> Option<(QVec, QVec)> {
        let first = self.vertices.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for v in &self.vertices {
            for i in 0..self.ambient {
                if v[i] < lo[i] {
                    lo[i] = v[i];
                }
                if v[i] > hi[i] {
                    hi[i] = v[i];
                }
            }
        }
        Some((lo, hi))
    }

    /// Integer points, optionally filtered, sorted lexicographically.
    pub fn lattice_points(&self, filter: Option<&dyn Fn(&[i64]) -> bool>) -> Vec<Weight> {
        let Some((lo, hi)) = self.bounding_box() else {
            return vec![];
        };
        let lo: Vec<i64> = lo.iter().map(|x| ceil(x) as i64).collect();
        let hi: Vec<i64> = hi.iter().map(|x| floor(x) as i64).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return vec![];
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&qv(&cur)) && filter.is_none_or(|f| f(&cur)) {
                out.push(cur.clone());
            }
            // odometer, last coordinate fastest
            let mut i = self.ambient;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    for j in (i + 1)..self.ambient {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
            if self.ambient == 0 {
                return out;
            }
        }
    }

    /// Vertex indices of the face cut out by a set of facets.
    pub fn face_vertices(&self, facets: &[usize]) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| facets.iter().all(|&j| self.halfspaces[j].slack(&self.vertices[v]).is_zero()))
            .collect()
    }

    /// Face determined by a set of tight facets, with its canonical (closed) facet set.
    pub fn face_from_facets(&self, facets: &[usize]) -> Option<Face> {
        let vs = self.face_vertices(facets);
        if vs.is_empty() {
            return None;
        }
        Some(self.face_from_vertex_set(&vs))
    }

    fn face_from_vertex_set(&self, vs: &[usize]) -> Face {
        let pts: Vec<&QVec> = vs.iter().map(|&i| &self.vertices[i]).collect();
        let facet_indices: Vec<usize> = (0..self.halfspaces.len())
            .filter(|&j| pts.iter().all(|p| self.halfspaces[j].slack(p).is_zero()))
            .collect();
        let d = affine_dim(&pts);
        Face {
            facet_indices,
            codim: self.dim() - d,
            sample: centroid(&pts, self.ambient),
            affine_span: affine_basis(&pts),
            vertex_indices: vs.to_vec(),
        }
    }

    /// All proper faces with `1 <= codim <= max_codim`, ordered by codim then facet set.
    pub fn faces(&self, max_codim: usize) -> Vec<Face> {
        let facet_sets: Vec<BTreeSet<usize>> =
            (0..self.halfspaces.len()).map(|j| self.face_vertices(&[j]).into_iter().collect()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<BTreeSet<usize>> = Vec::new();
        for s in &facet_sets {
            let v: Vec<usize> = s.iter().copied().collect();
            if !v.is_empty() && seen.insert(v) {
                frontier.push(s.clone());
            }
        }
        while let Some(s) = frontier.pop() {
            for t in &facet_sets {
                let i: BTreeSet<usize> = s.intersection(t).copied().collect();
                let v: Vec<usize> = i.iter().copied().collect();
                if !v.is_empty() && seen.insert(v) {
                    frontier.push(i);
                }
            }
        }
        let mut faces: Vec<Face> = seen
            .iter()
            .map(|vs| self.face_from_vertex_set(vs))
            .filter(|f| f.codim >= 1 && f.codim <= max_codim)
            .collect();
        faces.sort_by(|a, b| (a.codim, &a.facet_indices).cmp(&(b.codim, &b.facet_indices)));
        faces
    }

    /// Euler characteristic of the boundary complex.
    pub fn boundary_euler(&self) -> i64 {
        let d = self.dim();
        self.faces(d)
            .iter()
            .map(|f| if (d - f.codim) % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn dual_point(&self, a: &[Rat]) -> Result<QVec> {
        let c = self.center.as_ref().ok_or(Error::NoCenter)?;
        Ok(qsub(&qscale(c, q(2)), a))
    }

    /// Index of the facet opposite to facet `j` under the central symmetry.
    pub fn dual_facet(&self, j: usize) -> Result<usize> {
        if self.center.is_none() {
            return Err(Error::NoCenter);
        }
        let neg: Weight = self.halfspaces[j].normal.iter().map(|x| -x).collect();
        self.facet_index(&neg).ok_or_else(|| Error::Inconsistent("no opposite facet".into()))
    }

    pub fn dual_face(&self, facets: &[usize]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = facets.iter().map(|&j| self.dual_facet(j)).collect::<Result<_>>()?;
        out.sort();
        Ok(out)
    }

    pub fn facet_index(&self, normal: &[i64]) -> Option<usize> {
        self.halfspaces.iter().position(|h| h.normal == normal)
    }

    /// Exact equality as point sets, via canonical vertex lists and the affine hull.
    pub fn same_set(&self, other: &Polytope) -> bool {
        self.vertices == other.vertices
    }

    pub fn to_json(&self) -> Value {
        json!({
            "halfspaces": self.halfspaces.iter().map(|h| json!({"normal": h.normal, "offset": h.offset.to_string()})).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(|v| crate::json::qvec(v)).collect::<Vec<_>>(),
        })
    }
}

/// The zonotope `Σ scale·[0,1]·g_i`, computed inside the span of the generators.
pub fn zonotope(gens: &[Weight], scale: Rat) -> Result<Polytope> {
    let n = match gens.first() {
        Some(g) => g.len(),
        None => return Err(Error::InvalidInput("zonotope needs at least one generator".into())),
    };
    let nonzero: Vec<&Weight> = gens.iter().filter(|g| g.iter().any(|x| *x != 0)).collect();
    let annihilator = int_kernel(&nonzero.iter().map(|g| (*g).clone()).collect::<Vec<_>>(), n);
    let equations: Vec<HalfSpace> = annihilator.iter().map(|l| HalfSpace::new(l.clone(), Rat::zero())).collect();
    let r = n - annihilator.len();
    let mut dirs: BTreeSet<Weight> = BTreeSet::new();
    for g in &nonzero {
        let p = primitive_i(g);
        let (p, _) = crate::linalg::sign_normalize(&p);
        dirs.insert(p);
    }
    let dirs: Vec<Weight> = dirs.into_iter().collect();
    let mut normals: BTreeSet<Weight> = BTreeSet::new();
    if r >= 1 {
        for sub in subsets(dirs.len(), r - 1) {
            let mut rows: Vec<QVec> = sub.iter().map(|&i| qv(&dirs[i])).collect();
            rows.extend(annihilator.iter().map(|l| qv(l)));
            if let Some(lam) = crate::linalg::normal_of(&rows, n) {
                normals.insert(crate::linalg::wneg(&lam));
                normals.insert(lam);
            }
        }
    }
    let halfspaces: Vec<HalfSpace> = normals
        .into_iter()
        .map(|lam| {
            let off = gens.iter().fold(Rat::zero(), |acc, g| acc + q(crate::linalg::dot(g, &lam).min(0)));
            HalfSpace { normal: lam, offset: off * scale }
        })
        .collect();
    let mut p = Polytope::from_constraints(n, equations, halfspaces);
    let sum = gens.iter().fold(vec![0i64; n], |acc, g| crate::linalg::wadd(&acc, g));
    p.center = Some(qscale(&qv(&sum), scale / q(2)));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i128, b: i128) -> Rat {
        Rat::new(a, b)
    }

    fn interval(a: Rat, b: Rat) -> Polytope {
        Polytope::from_constraints(1, vec![], vec![HalfSpace::new(vec![1], a), HalfSpace::new(vec![-1], -b)])
    }

    /// All subset sums, the defining oracle for a zonotope.
    fn subset_sums(gens: &[Weight], scale: Rat) -> Vec<QVec> {
        let n = gens[0].len();
        (0..(1u32 << gens.len()))
            .map(|mask| {
                let mut s = vec![0i64; n];
                for (i, g) in gens.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        s = crate::linalg::wadd(&s, g);
                    }
                }
                qscale(&qv(&s), scale)
            })
            .collect()
    }

    #[test]
    fn zonotope_examples() {
        let z = zonotope(&[vec![1], vec![1], vec![-1], vec![-1]], q(1)).unwrap();
        assert_eq!(z.vertices, vec![vec![q(-2)], vec![q(2)]]);
        assert_eq!(z.center, Some(vec![q(0)]));
        let z = zonotope(&[vec![1], vec![-1]], r(1, 2)).unwrap();
        assert_eq!(z.vertices, vec![vec![r(-1, 2)], vec![r(1, 2)]]);
        let z = zonotope(&[vec![0]], q(1)).unwrap();
        assert_eq!(z.vertices, vec![vec![q(0)]]);
        assert!(z.halfspaces.is_empty());
    }

    #[test]
    fn zonotope_in_a_subspace() {
        let z = zonotope(&[vec![1, 1], vec![-1, -1], vec![2, 2]], q(1)).unwrap();
        assert_eq!(z.vertices, vec![vec![q(-1), q(-1)], vec![q(3), q(3)]]);
        assert_eq!(z.equations.len(), 1);
        assert_eq!(z.dim(), 1);
        let f = z.faces(1);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn face_examples() {
        let p = interval(q(0), q(2));
        let f = p.faces(1);
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].sample, vec![q(2)]);
        assert_eq!(f[1].sample, vec![q(0)]);
        let sq = Polytope::from_constraints(
            2,
            vec![],
            vec![
                HalfSpace::new(vec![1, 0], q(0)),
                HalfSpace::new(vec![-1, 0], q(-1)),
                HalfSpace::new(vec![0, 1], q(0)),
                HalfSpace::new(vec![0, -1], q(-1)),
            ],
        );
        let f = sq.faces(2);
        assert_eq!(f.iter().filter(|x| x.codim == 1).count(), 4);
        assert_eq!(f.iter().filter(|x| x.codim == 2).count(), 4);
        assert_eq!(sq.boundary_euler(), 0);
    }

    #[test]
    fn gl2_sigma_is_an_octagon() {
        let w = vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3], vec![-3, 0], vec![-2, -1], vec![-1, -2], vec![0, -3]];
        let s = zonotope(&w, r(1, 2)).unwrap();
        // four distinct lines give an octagon
        assert_eq!(s.vertices.len(), 8);
        let faces = s.faces(2);
        assert_eq!(faces.iter().filter(|f| f.codim == 1).count(), 8);
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(interval(r(-1, 2), r(3, 2)).lattice_points(None), vec![vec![0], vec![1]]);
        assert_eq!(interval(r(-3, 2), r(3, 2)).lattice_points(None), vec![vec![-1], vec![0], vec![1]]);
        assert!(interval(r(1, 2), r(1, 2)).lattice_points(None).is_empty());
    }

    #[test]
    fn duals() {
        let mut p = interval(q(0), q(2));
        p.center = Some(vec![q(1)]);
        assert_eq!(p.dual_point(&[q(0)]).unwrap(), vec![q(2)]);
        let lower = p.tight_set(&[q(0)]);
        let upper = p.dual_face(&lower).unwrap();
        assert_eq!(p.face_from_facets(&upper).unwrap().sample, vec![q(2)]);
        assert_eq!(p.dual_face(&upper).unwrap(), lower);
    }

    fn arb_gens() -> impl Strategy<Value = Vec<Weight>> {
        (1usize..=3).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-2i64..=2, n), 1..6))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn zonotope_matches_subset_sums(gens in arb_gens()) {
            let z = zonotope(&gens, q(1)).unwrap();
            let sums = subset_sums(&gens, q(1));
            for s in &sums {
                prop_assert!(z.contains(s));
            }
            // every vertex is a subset sum
            for v in &z.vertices {
                prop_assert!(sums.contains(v));
            }
            // H/V cross-validation
            let again = enumerate_vertices(z.ambient, &z.equations, &z.halfspaces);
            prop_assert_eq!(&again, &z.vertices);
            // central symmetry
            for v in &z.vertices {
                let d = z.dual_point(v).unwrap();
                prop_assert!(z.vertices.contains(&d));
            }
            let d = z.dim();
            if d >= 1 {
                let chi = z.boundary_euler();
                prop_assert_eq!(chi, if d % 2 == 0 { 0 } else { 2 });
                for f in z.faces(d) {
                    let df = z.dual_face(&f.facet_indices).unwrap();
                    let g = z.face_from_facets(&df).unwrap();
                    prop_assert_eq!(g.codim, f.codim);
                    prop_assert_eq!(z.dual_face(&df).unwrap(), f.facet_indices.clone());
                    prop_assert_eq!(z.tight_set(&f.sample), f.facet_indices.clone());
                }
            }
        }

        #[test]
        fn lattice_points_match_scan(gens in arb_gens(), num in -3i128..3, den in 1i128..4) {
            let z = zonotope(&gens, Rat::new(1, 2)).unwrap();
            let shift: QVec = (0..z.ambient).map(|i| Rat::new(num + i as i128, den)).collect();
            let p = z.translate(&shift);
            let pts = p.lattice_points(None);
            let mut naive = Vec::new();
            let n = p.ambient;
            let span = 8i64;
            let mut cur = vec![-span; n];
            loop {
                if p.contains(&qv(&cur)) { naive.push(cur.clone()); }
                let mut i = n;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    if cur[i] < span { cur[i] += 1; for c in cur.iter_mut().skip(i + 1) { *c = -span; } done = false; break; }
                }
                if done { break; }
            }
            prop_assert_eq!(pts, naive);
        }
    }
}
