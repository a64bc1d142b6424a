//! Windows `C_δ`, wall faces `F_χ(δ₀)` with their weight data, daggers and the crossing map μ.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::geometry::{Face, Polytope};
use crate::linalg::{dot, fmt_qvec, qadd, qdot_i, qscale, qsub, qv, wadd, wneg, QVec, Rat, Weight};
use crate::rep::QSRep;
use crate::root_data::Dominance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub delta: QVec,
    pub chars: Vec<Weight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceData {
    pub delta0: QVec,
    pub face: Face,
    pub inward_normals: Vec<Weight>,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub beta_plus: Weight,
    pub d_plus: usize,
    pub d_minus: usize,
    pub dominant: bool,
}

impl FaceData {
    /// Canonical identifier: the tight facet set of `δ₀+½Σ`.
    pub fn id(&self) -> &[usize] {
        &self.face.facet_indices
    }

    pub fn to_json(&self) -> Value {
        json!({
            "facets": self.face.facet_indices,
            "codim": self.face.codim,
            "inward_normals": self.inward_normals,
            "plus": self.plus,
            "minus": self.minus,
            "zero": self.zero,
            "beta_plus": self.beta_plus,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "dominant": self.dominant,
        })
    }
}

/// Characters of one face class together with their μ-images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceClass {
    pub face: FaceData,
    pub chars: Vec<Weight>,
    pub images: Vec<Weight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub delta: QVec,
    pub delta_prime: QVec,
    pub delta0: QVec,
    pub from: Window,
    pub to: Window,
    pub common: Vec<Weight>,
    pub faces: Vec<FaceClass>,
}

impl Crossing {
    pub fn mu(&self, chi: &[i64]) -> Option<&Weight> {
        self.faces.iter().find_map(|c| c.chars.iter().position(|x| x == chi).map(|i| &c.images[i]))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "delta": crate::json::qvec(&self.delta),
            "delta_prime": crate::json::qvec(&self.delta_prime),
            "delta0": crate::json::qvec(&self.delta0),
            "common": self.common,
            "faces": self.faces.iter().map(|c| {
                let mut v = c.face.to_json();
                v["chars"] = json!(c.chars);
                v["images"] = json!(c.images);
                v
            }).collect::<Vec<_>>(),
        })
    }
}

pub fn window(rep: &QSRep, arr: &Arrangement, delta: &[Rat]) -> Result<Window> {
    arr.chamber_of(delta)?;
    let rd = &rep.root_datum;
    let p = rep.nabla.translate(delta);
    let chars = p.lattice_points(Some(&|m: &[i64]| rd.is_dominant(m)));
    if let Some(m) = chars.iter().find(|m| p.on_boundary(&qv(m))) {
        return Err(Error::Inconsistent(format!("{m:?} on ∂(δ+∇) off the walls")));
    }
    Ok(Window { delta: delta.to_vec(), chars })
}

fn wall_polytope(rep: &QSRep, delta0: &[Rat]) -> Polytope {
    rep.half_sigma.translate(delta0)
}

/// Face data of the face of `δ₀+½Σ` cut out by `facets`.
pub fn face_data(rep: &QSRep, delta0: &[Rat], facets: &[usize]) -> Result<FaceData> {
    let p = wall_polytope(rep, delta0);
    let face = p.face_from_facets(facets).ok_or_else(|| Error::InvalidInput("empty face".into()))?;
    let inward_normals: Vec<Weight> = face.facet_indices.iter().map(|&j| p.halfspaces[j].normal.clone()).collect();
    let (mut plus, mut minus, mut zero) = (vec![], vec![], vec![]);
    for (i, b) in rep.weights.iter().enumerate() {
        let pos = inward_normals.iter().any(|l| dot(b, l) > 0);
        let neg = inward_normals.iter().any(|l| dot(b, l) < 0);
        match (pos, neg) {
            (true, false) => plus.push(i),
            (false, true) => minus.push(i),
            (false, false) => zero.push(i),
            (true, true) => return Err(Error::Inconsistent(format!("weight {i} has mixed signs on a face"))),
        }
    }
    let beta_plus = plus.iter().fold(vec![0; rep.rank()], |acc, &i| wadd(&acc, &rep.weights[i]));
    let rd = &rep.root_datum;
    let dominant = face.vertex_indices.iter().all(|&v| rd.is_dominant_q(&p.vertices[v]));
    Ok(FaceData {
        delta0: delta0.to_vec(),
        d_plus: plus.len(),
        d_minus: minus.len(),
        face,
        inward_normals,
        plus,
        minus,
        zero,
        beta_plus,
        dominant,
    })
}

/// `F_χ(δ₀)`: the smallest face of `δ₀+½Σ` containing `ρ+χ`.
pub fn face_of(rep: &QSRep, chi: &[i64], delta0: &[Rat]) -> Result<FaceData> {
    let p = wall_polytope(rep, delta0);
    let x = qadd(&rep.root_datum.rho(), &qv(chi));
    if !p.on_boundary(&x) {
        return Err(Error::NotOnBoundary);
    }
    face_data(rep, delta0, &p.tight_set(&x))
}

/// The opposite face `F* = −F + 2δ₀`.
pub fn dual(rep: &QSRep, f: &FaceData) -> Result<FaceData> {
    let mut p = wall_polytope(rep, &f.delta0);
    p.center = Some(f.delta0.clone());
    let facets = p.dual_face(&f.face.facet_indices)?;
    face_data(rep, &f.delta0, &facets)
}

/// `F† = w₀(F*)`.
pub fn dagger(rep: &QSRep, f: &FaceData) -> Result<FaceData> {
    if !f.dominant {
        return Err(Error::FaceNotDominant);
    }
    let star = dual(rep, f)?;
    let rd = &rep.root_datum;
    let p = wall_polytope(rep, &f.delta0);
    let mut facets: Vec<usize> = star
        .face
        .facet_indices
        .iter()
        .map(|&j| {
            let l = rd.apply_co(rd.w0, &p.halfspaces[j].normal);
            p.facet_index(&l).ok_or_else(|| Error::Inconsistent("δ₀+½Σ is not W-invariant".into()))
        })
        .collect::<Result<_>>()?;
    facets.sort();
    let out = face_data(rep, &f.delta0, &facets)?;
    if out.face.codim != f.face.codim || !out.dominant {
        return Err(Error::Inconsistent("dagger changed codimension or dominance".into()));
    }
    Ok(out)
}

fn dominant_image(rep: &QSRep, v: &[i64]) -> Result<Weight> {
    match rep.root_datum.dominant_representative(v) {
        Dominance::Regular { chi_plus, .. } => Ok(chi_plus),
        Dominance::Singular => Err(Error::Singular(format!("{v:?}"))),
    }
}

/// The full wall-crossing data for an adjacent pair.
pub fn wall_crossing(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<Crossing> {
    let d = arr.distance(delta, delta_prime)?;
    if d != 1 {
        return Err(Error::NotAdjacent(d));
    }
    let delta0 = arr.crossing_point(delta, delta_prime)?;
    let from = window(rep, arr, delta)?;
    let to = window(rep, arr, delta_prime)?;
    let to_set: BTreeSet<&Weight> = to.chars.iter().collect();
    let from_set: BTreeSet<&Weight> = from.chars.iter().collect();
    let common: Vec<Weight> = from.chars.iter().filter(|c| to_set.contains(c)).cloned().collect();
    let wall = rep.nabla.translate(&delta0);
    let direction = qsub(delta_prime, delta);
    let mut classes: BTreeMap<Vec<usize>, FaceClass> = BTreeMap::new();
    for chi in from.chars.iter().filter(|c| !to_set.contains(c)) {
        if !wall.on_boundary(&qv(chi)) {
            return Err(Error::Inconsistent(format!("{chi:?} leaves the window but is not on ∂(δ₀+∇)")));
        }
        let f = face_of(rep, chi, &delta0)?;
        if !f.dominant {
            return Err(Error::Inconsistent("wall face is not dominant".into()));
        }
        if f.inward_normals.iter().any(|l| !qdot_i(&direction, l).is_positive()) {
            return Err(Error::Inconsistent("wall face has an inward normal against the crossing".into()));
        }
        let image = dominant_image(rep, &wadd(chi, &f.beta_plus))
            .map_err(|_| Error::Inconsistent(format!("μ({chi:?}) is singular")))?;
        if !to_set.contains(&image) || from_set.contains(&image) {
            return Err(Error::Inconsistent(format!("μ({chi:?}) = {image:?} is not in C_δ′ \\ C_δ")));
        }
        let e = classes
            .entry(f.face.facet_indices.clone())
            .or_insert_with(|| FaceClass { face: f, chars: vec![], images: vec![] });
        e.chars.push(chi.clone());
        e.images.push(image);
    }
    Ok(Crossing {
        delta: delta.to_vec(),
        delta_prime: delta_prime.to_vec(),
        delta0,
        from,
        to,
        common,
        faces: classes.into_values().collect(),
    })
}

/// `μ_(δ,δ′)(χ)`.
pub fn mu(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat], chi: &[i64]) -> Result<Weight> {
    let c = wall_crossing(rep, arr, delta, delta_prime)?;
    c.mu(chi).cloned().ok_or_else(|| Error::NotInWindow(format!("{chi:?}")))
}

/// Outcome of checking every structural property of one crossing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossingReport {
    pub failures: Vec<String>,
    pub faces: usize,
}

impl CrossingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(what());
        }
    }
}

/// Checks involutivity, the partition, dagger and β compatibilities, and the toric lemmas.
pub fn check_crossing(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<CrossingReport> {
    let fwd = wall_crossing(rep, arr, delta, delta_prime)?;
    let back = wall_crossing(rep, arr, delta_prime, delta)?;
    let rd = &rep.root_datum;
    let mut r = CrossingReport { faces: fwd.faces.len(), ..Default::default() };
    let at = || format!("δ={} δ′={}", fmt_qvec(delta), fmt_qvec(delta_prime));
    r.check(fwd.from.chars.len() == fwd.to.chars.len(), || format!("|C_δ| ≠ |C_δ′| at {}", at()));
    let mut union: Vec<Weight> = fwd.common.clone();
    let mut total = fwd.common.len();
    for c in &fwd.faces {
        union.extend(c.chars.iter().cloned());
        total += c.chars.len();
    }
    union.sort();
    union.dedup();
    r.check(union == fwd.from.chars && total == fwd.from.chars.len(), || format!("partition fails at {}", at()));
    let back_faces: BTreeSet<Vec<usize>> = back.faces.iter().map(|c| c.face.id().to_vec()).collect();
    for c in &fwd.faces {
        for (chi, img) in c.chars.iter().zip(&c.images) {
            r.check(back.mu(img) == Some(chi), || format!("μ′∘μ({chi:?}) ≠ χ at {}", at()));
            if let Ok(g) = face_of(rep, img, &fwd.delta0) {
                r.check(g.beta_plus == wneg(&rd.apply(rd.w0, &c.face.beta_plus)), || format!("β-dual compatibility fails for {chi:?} at {}", at()));
                match dagger(rep, &c.face) {
                    Ok(fd) => r.check(fd.face.facet_indices == g.face.facet_indices, || format!("F_μ(χ) ≠ F_χ† for {chi:?} at {}", at())),
                    Err(e) => r.failures.push(format!("dagger failed: {e}")),
                }
            } else {
                r.failures.push(format!("μ({chi:?}) not on the wall polytope boundary at {}", at()));
            }
        }
        if let Ok(fd) = dagger(rep, &c.face) {
            r.check(back_faces.contains(fd.id()), || format!("F† not in ℱ_(δ′,δ) at {}", at()));
            if let Ok(fdd) = dagger(rep, &fd) {
                r.check(fdd.id() == c.face.id(), || format!("dagger is not an involution at {}", at()));
            }
        }
        let star = dual(rep, &c.face)?;
        r.check(star.beta_plus == wneg(&c.face.beta_plus), || format!("β_F*⁺ ≠ −β_F⁺ at {}", at()));
        let p = wall_polytope(rep, &fwd.delta0);
        let shifted: Vec<QVec> = c.face.face.vertex_indices.iter().map(|&v| qadd(&p.vertices[v], &qv(&c.face.beta_plus))).collect();
        let mut star_vertices: Vec<QVec> = star.face.vertex_indices.iter().map(|&v| p.vertices[v].clone()).collect();
        let mut shifted = shifted;
        shifted.sort();
        star_vertices.sort();
        r.check(shifted == star_vertices, || format!("F* ≠ F + β_F⁺ at {}", at()));
        r.check(lattice_symmetry_holds(rep, &c.face, delta), || format!("lattice-point symmetry fails at {}", at()));
    }
    if rd.is_torus() {
        r.check(fwd.faces.len() == 1, || format!("toric crossing with {} faces at {}", fwd.faces.len(), at()));
        let common: BTreeSet<&Weight> = fwd.common.iter().collect();
        for c in &fwd.faces {
            let sums = crate::bwb::wedge_star(rep, &c.face);
            for chi in &c.chars {
                for b in &sums {
                    let v = wadd(chi, b);
                    r.check(common.contains(&v), || format!("χ+β = {v:?} not in C_δ∩C_δ′ at {}", at()));
                }
            }
        }
    }
    Ok(r)
}

/// Points of `F° ∩ (M⁺+ρ)` and their reflections through `δ₀ − ½β_F⁺` lie in `δ+½Σ`.
fn lattice_symmetry_holds(rep: &QSRep, f: &FaceData, delta: &[Rat]) -> bool {
    let rd = &rep.root_datum;
    let p = wall_polytope(rep, &f.delta0);
    let rho = rd.rho();
    let target = rep.half_sigma.translate(delta);
    let centre = qsub(&f.delta0, &qscale(&qv(&f.beta_plus), Rat::new(1, 2)));
    let shifted = p.translate(&qscale(&rho, Rat::from_integer(-1)));
    let candidates = shifted.lattice_points(Some(&|m: &[i64]| rd.is_dominant(m)));
    for m in candidates {
        let x = qadd(&qv(&m), &rho);
        if p.tight_set(&x) != f.face.facet_indices {
            continue;
        }
        let xs = qsub(&qscale(&centre, Rat::from_integer(2)), &x);
        if !target.contains(&x) || !target.contains(&xs) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::root_data::RootDatum;

    fn r(a: i128, b: i128) -> Rat {
        Rat::new(a, b)
    }

    fn t1111() -> QSRep {
        QSRep::from_torus(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap()
    }

    #[test]
    fn torus_windows() {
        let rep = t1111();
        let a = Arrangement::build(&rep).unwrap();
        assert_eq!(window(&rep, &a, &[r(1, 2)]).unwrap().chars, vec![vec![0], vec![1]]);
        assert_eq!(window(&rep, &a, &[r(3, 2)]).unwrap().chars, vec![vec![1], vec![2]]);
        assert!(matches!(window(&rep, &a, &[q(1)]), Err(Error::OnWall(_))));
    }

    #[test]
    fn torus_faces() {
        let rep = t1111();
        let f = face_of(&rep, &[0], &[q(1)]).unwrap();
        assert_eq!(f.inward_normals, vec![vec![1]]);
        assert_eq!(f.plus, vec![0, 1]);
        assert_eq!(f.beta_plus, vec![2]);
        assert_eq!(f.d_plus, 2);
        let g = face_of(&rep, &[2], &[q(1)]).unwrap();
        assert_eq!(g.beta_plus, vec![-2]);
        assert_eq!(dagger(&rep, &f).unwrap().id(), g.id());
        assert_eq!(dagger(&rep, &dagger(&rep, &f).unwrap()).unwrap().id(), f.id());
        assert!(matches!(face_of(&rep, &[1], &[q(1)]), Err(Error::NotOnBoundary)));
    }

    #[test]
    fn torus_mu() {
        let rep = t1111();
        let a = Arrangement::build(&rep).unwrap();
        assert_eq!(mu(&rep, &a, &[r(1, 2)], &[r(3, 2)], &[0]).unwrap(), vec![2]);
        assert_eq!(mu(&rep, &a, &[r(3, 2)], &[r(1, 2)], &[2]).unwrap(), vec![0]);
        assert!(matches!(mu(&rep, &a, &[r(1, 2)], &[r(5, 2)], &[0]), Err(Error::NotAdjacent(2))));
        assert!(matches!(mu(&rep, &a, &[r(1, 2)], &[r(3, 2)], &[1]), Err(Error::NotInWindow(_))));
        let c = wall_crossing(&rep, &a, &[r(1, 2)], &[r(3, 2)]).unwrap();
        assert_eq!(c.common, vec![vec![1]]);
        assert_eq!(c.faces.len(), 1);
        assert_eq!(c.faces[0].chars, vec![vec![0]]);
        assert!(check_crossing(&rep, &a, &[r(1, 2)], &[r(3, 2)]).unwrap().ok());
    }

    #[test]
    fn chamber_independence() {
        let rep = QSRep::from_torus(vec![vec![1], vec![1], vec![1], vec![-1], vec![-1], vec![-1]]).unwrap();
        let a = Arrangement::build(&rep).unwrap();
        let w1 = window(&rep, &a, &[r(1, 10)]).unwrap();
        let w2 = window(&rep, &a, &[r(-4, 10)]).unwrap();
        assert_eq!(w1.chars, w2.chars);
        let c1 = wall_crossing(&rep, &a, &[r(1, 10)], &[r(9, 10)]).unwrap();
        let c2 = wall_crossing(&rep, &a, &[r(-2, 5)], &[r(3, 5)]).unwrap();
        assert_eq!(c1.common, c2.common);
        assert_eq!(c1.faces.iter().map(|c| &c.chars).collect::<Vec<_>>(), c2.faces.iter().map(|c| &c.chars).collect::<Vec<_>>());
    }

    #[test]
    fn gl2_window_at_zero() {
        let w = vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3], vec![-3, 0], vec![-2, -1], vec![-1, -2], vec![0, -3]];
        let rep = QSRep::new(RootDatum::gl(2).unwrap(), w, false).unwrap();
        let a = Arrangement::build(&rep).unwrap();
        let win = window(&rep, &a, &[r(-1, 4), r(-1, 4)]).unwrap();
        // dominant points with coordinates in [-2,2] and 0 <= a-b <= 2
        let mut expected = Vec::new();
        for x in -2..=2i64 {
            for y in -2..=2i64 {
                if (0..=2).contains(&(x - y)) {
                    expected.push(vec![x, y]);
                }
            }
        }
        assert_eq!(win.chars, expected);
    }
}
