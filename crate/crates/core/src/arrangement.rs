//! The periodic wall arrangement inside the invariant characters, chambers and distances.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{HalfSpace, Polytope};
use crate::linalg::{
    dot, fmt_qvec, q, qadd, qdot_i, qscale, qsub, sign_normalize, QVec, Rat, Weight,
};
use crate::rep::QSRep;

/// Parallel walls `<t, normal> ∈ base_offset + offset_step·Z` in invariant coordinates `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallFamily {
    pub normal: Weight,
    pub base_offset: Rat,
    pub offset_step: Rat,
    pub source_facet: usize,
}

/// A single wall, identified by its primitive normal and position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    pub normal: Weight,
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub sign_vector: Vec<i128>,
    pub sample: QVec,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub families: Vec<WallFamily>,
    /// Lattice basis of `M^W`, the coordinates `t` are taken in.
    pub basis: Vec<Weight>,
    pub ambient: usize,
    sigma_normals: Vec<Weight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleReport {
    pub d01: usize,
    pub d12: usize,
    pub d02: usize,
    pub symmetric_difference_holds: bool,
    pub equality_case: bool,
}

fn rat_mod(x: Rat, m: Rat) -> Rat {
    let k = (x / m).floor();
    x - k * m
}

impl Arrangement {
    pub fn build(rep: &QSRep) -> Result<Arrangement> {
        let rd = &rep.root_datum;
        let basis = rd.invariant_basis.clone();
        if basis.is_empty() {
            return Err(Error::ArrangementDegenerate("M^W is zero".into()));
        }
        let restrict = |l: &[i64]| -> Weight { basis.iter().map(|u| dot(u, l)).collect() };
        for h in &rep.sigma.halfspaces {
            if restrict(&h.normal).iter().all(|x| *x == 0) {
                return Err(Error::ArrangementDegenerate("no generic ℓ: a facet of Σ is parallel to M^W".into()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut families = Vec::new();
        for (j, h) in rep.nabla.halfspaces.iter().enumerate() {
            let nu = restrict(&h.normal);
            if nu.iter().all(|x| *x == 0) {
                if h.offset.is_integer() {
                    return Err(Error::ArrangementDegenerate("a wall contains all of M^W".into()));
                }
                continue;
            }
            let g = nu.iter().fold(0i64, |acc, x| acc.gcd(x));
            let (normal, s) = sign_normalize(&nu.iter().map(|x| x / g).collect::<Vec<_>>());
            let step = Rat::new(1, g as i128);
            let base = rat_mod(h.offset * q(s) / q(g), step);
            if seen.insert((normal.clone(), base, step)) {
                families.push(WallFamily { normal, base_offset: base, offset_step: step, source_facet: j });
            }
        }
        if families.is_empty() {
            return Err(Error::ArrangementDegenerate("no walls".into()));
        }
        Ok(Arrangement { families, basis, ambient: rd.rank, sigma_normals: rep.sigma_normals() })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Invariant coordinates of a point of `M_R^W` given in full coordinates.
    pub fn coords(&self, delta: &[Rat]) -> Result<QVec> {
        if delta.len() != self.ambient {
            return Err(Error::InvalidInput(format!("δ must have {} coordinates", self.ambient)));
        }
        let k = self.dim();
        let rows: Vec<QVec> = (0..self.ambient)
            .map(|i| {
                let mut r: QVec = self.basis.iter().map(|b| q(b[i])).collect();
                r.push(delta[i]);
                r
            })
            .collect();
        let (m, piv) = crate::linalg::rref(&rows);
        if piv.contains(&k) {
            return Err(Error::InvalidInput(format!("{} is not W-invariant", fmt_qvec(delta))));
        }
        let mut t = vec![Rat::zero(); k];
        for (row, p) in m.iter().zip(piv) {
            t[p] = row[k];
        }
        Ok(t)
    }

    pub fn point(&self, t: &[Rat]) -> QVec {
        (0..self.ambient)
            .map(|i| t.iter().zip(&self.basis).fold(Rat::zero(), |acc, (ti, b)| acc + ti * q(b[i])))
            .collect()
    }

    fn index_in(&self, f: &WallFamily, v: Rat) -> (i128, bool) {
        let x = (v - f.base_offset) / f.offset_step;
        (x.floor().to_integer(), x.is_integer())
    }

    /// Walls through a point, given in invariant coordinates.
    pub fn walls_through(&self, t: &[Rat]) -> Vec<Wall> {
        let mut out = BTreeSet::new();
        for f in &self.families {
            let v = qdot_i(t, &f.normal);
            if self.index_in(f, v).1 {
                out.insert(Wall { normal: f.normal.clone(), value: v });
            }
        }
        out.into_iter().collect()
    }

    pub fn is_on_wall(&self, delta: &[Rat]) -> Result<bool> {
        Ok(!self.walls_through(&self.coords(delta)?).is_empty())
    }

    fn ensure_off_wall(&self, t: &[Rat]) -> Result<()> {
        if let Some(w) = self.walls_through(t).first() {
            return Err(Error::OnWall(format!("{} (wall <t,{:?}> = {})", fmt_qvec(&self.point(t)), w.normal, w.value)));
        }
        Ok(())
    }

    pub fn chamber_of(&self, delta: &[Rat]) -> Result<Chamber> {
        let t = self.coords(delta)?;
        self.ensure_off_wall(&t)?;
        let sign_vector = self.families.iter().map(|f| self.index_in(f, qdot_i(&t, &f.normal)).0).collect();
        Ok(Chamber { sign_vector, sample: t })
    }

    pub fn same_chamber(&self, a: &[Rat], b: &[Rat]) -> Result<bool> {
        Ok(self.chamber_of(a)?.sign_vector == self.chamber_of(b)?.sign_vector)
    }

    /// `ℋ(δ,δ′)`: walls meeting the segment.
    pub fn separating(&self, a: &[Rat], b: &[Rat]) -> Result<BTreeSet<Wall>> {
        let ta = self.coords(a)?;
        let tb = self.coords(b)?;
        self.ensure_off_wall(&ta)?;
        self.ensure_off_wall(&tb)?;
        let mut out = BTreeSet::new();
        for f in &self.families {
            let ia = self.index_in(f, qdot_i(&ta, &f.normal)).0;
            let ib = self.index_in(f, qdot_i(&tb, &f.normal)).0;
            for j in (ia.min(ib) + 1)..=ia.max(ib) {
                out.insert(Wall { normal: f.normal.clone(), value: f.base_offset + f.offset_step * Rat::from_integer(j) });
            }
        }
        Ok(out)
    }

    pub fn distance(&self, a: &[Rat], b: &[Rat]) -> Result<usize> {
        Ok(self.separating(a, b)?.len())
    }

    pub fn is_adjacent(&self, a: &[Rat], b: &[Rat]) -> Result<bool> {
        Ok(self.distance(a, b)? == 1)
    }

    /// The point where the segment `[a,b]` meets the single wall separating them.
    pub fn crossing_point(&self, a: &[Rat], b: &[Rat]) -> Result<QVec> {
        let walls = self.separating(a, b)?;
        if walls.len() != 1 {
            return Err(Error::NotAdjacent(walls.len()));
        }
        let w = walls.into_iter().next().unwrap();
        let ta = self.coords(a)?;
        let tb = self.coords(b)?;
        let va = qdot_i(&ta, &w.normal);
        let vb = qdot_i(&tb, &w.normal);
        let s = (w.value - va) / (vb - va);
        Ok(qadd(a, &qscale(&qsub(b, a), s)))
    }

    /// Whether `<ℓ, λ> ≠ 0` for every facet normal `λ` of Σ.
    pub fn is_generic_ell(&self, ell: &[Rat]) -> Result<bool> {
        self.coords(ell)?;
        Ok(self.sigma_normals.iter().all(|l| !qdot_i(ell, l).is_zero()))
    }

    /// Sign of `<v, wall normal>` for a vector `v` of `M_R^W` in full coordinates.
    pub fn orientation(&self, v: &[Rat], wall: &Wall) -> Result<i8> {
        let t = self.coords(v)?;
        Ok(crate::linalg::sign(&qdot_i(&t, &wall.normal)))
    }

    pub fn triangle_check(&self, a: &[Rat], b: &[Rat], c: &[Rat]) -> Result<TriangleReport> {
        let h01 = self.separating(a, b)?;
        let h12 = self.separating(b, c)?;
        let h02 = self.separating(a, c)?;
        let sym: BTreeSet<Wall> = h01.symmetric_difference(&h12).cloned().collect();
        Ok(TriangleReport {
            d01: h01.len(),
            d12: h12.len(),
            d02: h02.len(),
            symmetric_difference_holds: sym == h02,
            equality_case: h02.len() == h01.len() + h12.len(),
        })
    }

    /// Distinct walls meeting the box `[lo, hi]` in invariant coordinates.
    pub fn walls_in_box(&self, lo: &[Rat], hi: &[Rat]) -> Vec<Wall> {
        let mut out = BTreeSet::new();
        for f in &self.families {
            let (mut vmin, mut vmax) = (Rat::zero(), Rat::zero());
            for (i, &c) in f.normal.iter().enumerate() {
                let (a, b) = (lo[i] * q(c), hi[i] * q(c));
                vmin += a.min(b);
                vmax += a.max(b);
            }
            let jmin = ((vmin - f.base_offset) / f.offset_step).ceil().to_integer();
            let jmax = ((vmax - f.base_offset) / f.offset_step).floor().to_integer();
            for j in jmin..=jmax {
                out.insert(Wall { normal: f.normal.clone(), value: f.base_offset + f.offset_step * Rat::from_integer(j) });
            }
        }
        out.into_iter().collect()
    }

    /// The symmetric box of `periods` fundamental domains per coordinate.
    pub fn default_box(&self, periods: i64) -> (QVec, QVec) {
        let k = self.dim();
        (vec![Rat::new(-(periods as i128), 2); k], vec![Rat::new(periods as i128, 2); k])
    }

    /// Chambers meeting the open box, each clipped to the box, by successive splitting.
    pub fn chambers_in_box(&self, lo: &[Rat], hi: &[Rat]) -> Vec<(Chamber, Polytope)> {
        let k = self.dim();
        let mut box_hs = Vec::new();
        for i in 0..k {
            let e: Weight = (0..k).map(|j| i64::from(i == j)).collect();
            box_hs.push(HalfSpace::new(e.clone(), lo[i]));
            box_hs.push(HalfSpace::new(e.iter().map(|x| -x).collect(), -hi[i]));
        }
        let mut cells = vec![Polytope::from_constraints(k, vec![], box_hs)];
        for w in self.walls_in_box(lo, hi) {
            let mut next = Vec::with_capacity(cells.len() * 2);
            for c in cells {
                let vals: Vec<Rat> = c.vertices.iter().map(|v| qdot_i(v, &w.normal) - w.value).collect();
                let above = vals.iter().any(|x| x.is_positive());
                let below = vals.iter().any(|x| x.is_negative());
                if above && below {
                    let up = HalfSpace::new(w.normal.clone(), w.value);
                    let down = HalfSpace::new(w.normal.iter().map(|x| -x).collect(), -w.value);
                    next.push(c.intersect(&[up]));
                    next.push(c.intersect(&[down]));
                } else {
                    next.push(c);
                }
            }
            cells = next;
        }
        let mut out: Vec<(Chamber, Polytope)> = cells
            .into_iter()
            .map(|c| {
                let n = c.vertices.len() as i128;
                let mut s = vec![Rat::zero(); k];
                for v in &c.vertices {
                    s = qadd(&s, v);
                }
                let t = qscale(&s, Rat::new(1, n));
                let sign_vector = self.families.iter().map(|f| self.index_in(f, qdot_i(&t, &f.normal)).0).collect();
                (Chamber { sign_vector, sample: t }, c)
            })
            .collect();
        out.sort_by(|a, b| a.0.sign_vector.cmp(&b.0.sign_vector));
        out
    }

    /// Ordered adjacent pairs `(δ, δ′)` (full coordinates), one per chamber and wall facet inside the box.
    pub fn adjacent_pairs_in_box(&self, lo: &[Rat], hi: &[Rat]) -> Vec<(QVec, QVec)> {
        let cells = self.chambers_in_box(lo, hi);
        let mut seen: BTreeMap<(Vec<i128>, Vec<i128>), ()> = BTreeMap::new();
        let mut out = Vec::new();
        for (ch, poly) in &cells {
            for h in &poly.halfspaces {
                let (normal, s) = sign_normalize(&h.normal);
                let wall_value = h.offset * q(s);
                let is_wall = self.families.iter().any(|f| {
                    f.normal == normal && self.index_in(f, wall_value).1
                });
                if !is_wall {
                    continue;
                }
                let tight: Vec<&QVec> = poly.vertices.iter().filter(|v| h.slack(v).is_zero()).collect();
                let mut p = vec![Rat::zero(); self.dim()];
                for v in &tight {
                    p = qadd(&p, v);
                }
                let p = qscale(&p, Rat::new(1, tight.len() as i128));
                let dir: QVec = h.normal.iter().map(|&x| q(x)).collect();
                let eps = self.safe_step(&p, &dir);
                let inside = qadd(&p, &qscale(&dir, eps));
                let outside = qsub(&p, &qscale(&dir, eps));
                let (a, b) = (self.point(&inside), self.point(&outside));
                let (Ok(ca), Ok(cb)) = (self.chamber_of(&a), self.chamber_of(&b)) else { continue };
                debug_assert_eq!(ca.sign_vector, ch.sign_vector);
                if seen.insert((ca.sign_vector, cb.sign_vector), ()).is_none() {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// A step length along `dir` from `p` that meets no wall other than those through `p`.
    fn safe_step(&self, p: &[Rat], dir: &[Rat]) -> Rat {
        let mut best: Option<Rat> = None;
        for f in &self.families {
            let rate = crate::linalg::qdot_i(dir, &f.normal).abs();
            if rate.is_zero() {
                continue;
            }
            let v = qdot_i(p, &f.normal);
            let x = (v - f.base_offset) / f.offset_step;
            let gap = if x.is_integer() { Rat::from_integer(1) } else { (x - x.floor()).min(x.ceil() - x) };
            let d = gap * f.offset_step / rate;
            best = Some(best.map_or(d, |b: Rat| b.min(d)));
        }
        best.unwrap_or(Rat::from_integer(1)) / q(2)
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .families
            .iter()
            .map(|f| json!({
                "normal": f.normal,
                "base_offset": f.base_offset.to_string(),
                "offset_step": f.offset_step.to_string(),
                "source_facet": f.source_facet,
            }))
            .collect::<Vec<_>>())
    }
}

/// Boundary lattice-point test: `δ` is on a wall iff `∂(δ+∇)` contains a character.
pub fn on_wall_oracle(rep: &QSRep, delta: &[Rat]) -> bool {
    let p = rep.nabla.translate(delta);
    p.lattice_points(None).iter().any(|m| p.on_boundary(&crate::linalg::qv(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qv;
    use crate::root_data::RootDatum;
    use proptest::prelude::*;

    fn r(a: i128, b: i128) -> Rat {
        Rat::new(a, b)
    }

    fn t1111() -> QSRep {
        QSRep::from_torus(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap()
    }

    fn gl2() -> QSRep {
        let w = vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3], vec![-3, 0], vec![-2, -1], vec![-1, -2], vec![0, -3]];
        QSRep::new(RootDatum::gl(2).unwrap(), w, false).unwrap()
    }

    #[test]
    fn walls_of_examples() {
        let a = Arrangement::build(&t1111()).unwrap();
        assert_eq!(a.families.len(), 1);
        assert_eq!((a.families[0].base_offset, a.families[0].offset_step), (q(0), q(1)));
        let t = QSRep::from_torus(vec![vec![1], vec![1], vec![1], vec![-1], vec![-1], vec![-1]]).unwrap();
        let a = Arrangement::build(&t).unwrap();
        assert_eq!(a.families.len(), 1);
        assert_eq!(a.families[0].base_offset, r(1, 2));
        let a = Arrangement::build(&gl2()).unwrap();
        let walls = a.walls_in_box(&[q(-2)], &[q(2)]);
        let values: Vec<Rat> = walls.iter().map(|w| w.value).collect();
        assert_eq!(values, vec![r(-3, 2), r(-1, 2), r(1, 2), r(3, 2)]);
        assert!(a.is_on_wall(&[r(1, 2), r(1, 2)]).unwrap());
        assert!(a.coords(&[q(1), q(0)]).is_err());
    }

    #[test]
    fn chambers_and_distances() {
        let a = Arrangement::build(&t1111()).unwrap();
        assert_eq!(a.chamber_of(&[r(1, 2)]).unwrap().sign_vector, vec![0]);
        assert_eq!(a.chamber_of(&[r(-1, 2)]).unwrap().sign_vector, vec![-1]);
        assert!(matches!(a.chamber_of(&[q(1)]), Err(Error::OnWall(_))));
        let s = a.separating(&[r(1, 2)], &[r(3, 2)]).unwrap();
        assert_eq!(s.iter().map(|w| w.value).collect::<Vec<_>>(), vec![q(1)]);
        assert!(a.is_adjacent(&[r(1, 2)], &[r(3, 2)]).unwrap());
        assert_eq!(a.distance(&[r(1, 2)], &[r(5, 2)]).unwrap(), 2);
        assert_eq!(a.distance(&[r(1, 2)], &[r(1, 2) + r(1, 1_000_000_000)]).unwrap(), 0);
        assert_eq!(a.crossing_point(&[r(1, 4)], &[r(3, 2)]).unwrap(), vec![q(1)]);
    }

    #[test]
    fn generic_ell() {
        let a = Arrangement::build(&t1111()).unwrap();
        assert!(a.is_generic_ell(&[q(1)]).unwrap());
        assert!(!a.is_generic_ell(&[q(0)]).unwrap());
        let a = Arrangement::build(&gl2()).unwrap();
        assert!(a.is_generic_ell(&[q(1), q(1)]).unwrap());
    }

    #[test]
    fn triangle_examples() {
        let a = Arrangement::build(&t1111()).unwrap();
        let rep = a.triangle_check(&[r(1, 2)], &[r(3, 2)], &[r(5, 2)]).unwrap();
        assert!(rep.symmetric_difference_holds && rep.equality_case);
        let rep = a.triangle_check(&[r(1, 2)], &[r(3, 2)], &[r(1, 2)]).unwrap();
        assert!(rep.symmetric_difference_holds && !rep.equality_case);
        assert_eq!((rep.d01, rep.d12, rep.d02), (1, 1, 0));
    }

    #[test]
    fn boundary_oracle_on_grid() {
        for rep in [t1111(), gl2(), QSRep::from_torus(vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1], vec![1, 1], vec![-1, -1]]).unwrap()] {
            let a = Arrangement::build(&rep).unwrap();
            let k = a.dim();
            let steps: Vec<Rat> = (-6..=6).map(|i| r(i, 4)).collect();
            let grid: Vec<QVec> = if k == 1 { steps.iter().map(|s| vec![*s]).collect() } else { steps.iter().flat_map(|s| steps.iter().map(move |u| vec![*s, *u])).collect() };
            for t in grid {
                let d = a.point(&t);
                assert_eq!(a.is_on_wall(&d).unwrap(), on_wall_oracle(&rep, &d), "at {}", fmt_qvec(&d));
            }
        }
    }

    #[test]
    fn chamber_enumeration_rank2() {
        let rep = QSRep::from_torus(vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        let a = Arrangement::build(&rep).unwrap();
        // ∇ is the unit square centred at 0; walls are x,y ∈ 1/2+Z
        let cells = a.chambers_in_box(&[q(0), q(0)], &[q(2), q(2)]);
        assert_eq!(cells.len(), 9);
        let pairs = a.adjacent_pairs_in_box(&[q(0), q(0)], &[q(2), q(2)]);
        assert_eq!(pairs.len(), 24);
        for (x, y) in pairs {
            assert!(a.is_adjacent(&x, &y).unwrap());
        }
    }

    proptest! {
        #[test]
        fn periodicity_and_symmetry(a in -20i128..20, b in -20i128..20, m in -3i64..3, den in 1i128..7) {
            let arr = Arrangement::build(&gl2()).unwrap();
            let x = vec![Rat::new(2 * a + 1, 2 * den + 1); 2];
            let y = vec![Rat::new(2 * b + 1, 2 * den + 1); 2];
            prop_assume!(!arr.is_on_wall(&x).unwrap() && !arr.is_on_wall(&y).unwrap());
            let shift = qv(&[m, m]);
            let d = arr.distance(&x, &y).unwrap();
            prop_assert_eq!(d, arr.distance(&y, &x).unwrap());
            prop_assert_eq!(d, arr.distance(&qadd(&x, &shift), &qadd(&y, &shift)).unwrap());
        }
    }
}
