//! Summand bookkeeping for modules of covariants and their iterated toric mutations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::bwb::summand_sets;
use crate::error::{Error, Result};
use crate::linalg::{binomial, subsets, wadd, QVec, Rat, Weight};
use crate::rep::QSRep;
use crate::windows::{wall_crossing, window, FaceData};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Atom {
    Cov { chi: Weight },
    Ker { face: Vec<usize>, chi: Weight, i: usize },
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Cov { chi } => write!(f, "Cov({chi:?})"),
            Atom::Ker { face, chi, i } => write!(f, "Ker({face:?}, {chi:?}, {i})"),
        }
    }
}

/// A formal direct sum of atoms.
#[derive(Debug, Clone, Default, Eq)]
pub struct ModuleSpec {
    pub atoms: BTreeMap<Atom, usize>,
    pub provenance: Option<String>,
}

impl PartialEq for ModuleSpec {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl ModuleSpec {
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut m = ModuleSpec::default();
        for a in atoms {
            *m.atoms.entry(a).or_default() += 1;
        }
        m
    }

    pub fn cov(chars: impl IntoIterator<Item = Weight>) -> Self {
        Self::from_atoms(chars.into_iter().map(|chi| Atom::Cov { chi }))
    }

    /// Equality up to additive closure: multiplicities ignored.
    pub fn same_add(&self, other: &Self) -> bool {
        self.atoms.keys().eq(other.atoms.keys())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, &c) in &other.atoms {
            *out.atoms.entry(a.clone()).or_default() += c;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.atoms.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|(a, &c)| {
                let mut v = serde_json::to_value(a).expect("atom serializes");
                v["multiplicity"] = json!(c);
                v
            })
            .collect();
        match &self.provenance {
            Some(p) => json!({"atoms": atoms, "provenance": p}),
            None => json!({"atoms": atoms}),
        }
    }
}

/// `M_δ` as the covariant atoms over the window.
pub fn module_of_window(rep: &QSRep, arr: &Arrangement, delta: &[Rat]) -> Result<ModuleSpec> {
    let w = window(rep, arr, delta)?;
    let mut m = ModuleSpec::cov(w.chars);
    m.provenance = Some(format!("M at {}", crate::linalg::fmt_qvec(delta)));
    Ok(m)
}

/// The data of one toric wall: the pivot `C_δ∩C_δ′` and the two opposite faces at `δ₀`.
#[derive(Debug, Clone)]
pub struct ToricWall {
    pub delta: QVec,
    pub delta_prime: QVec,
    pub delta0: QVec,
    pub pivot: BTreeSet<Weight>,
    /// `F` (attached to `C_δ∖C_δ′`) and `F*` (attached to `C_δ′∖C_δ`).
    pub face: FaceData,
    pub dual_face: FaceData,
    side: BTreeMap<Weight, Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            _ => Err(Error::InvalidInput(format!("unknown direction {s:?}"))),
        }
    }
}

impl ToricWall {
    pub fn new(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<ToricWall> {
        if !rep.root_datum.is_torus() {
            return Err(Error::NotToric);
        }
        let fwd = wall_crossing(rep, arr, delta, delta_prime)?;
        let back = wall_crossing(rep, arr, delta_prime, delta)?;
        let single = |n: usize| Error::Inconsistent(format!("toric crossing with {n} faces"));
        let [f] = fwd.faces.as_slice() else { return Err(single(fwd.faces.len())) };
        let [g] = back.faces.as_slice() else { return Err(single(back.faces.len())) };
        for d in [f.face.d_plus, g.face.d_plus] {
            if d < 2 {
                return Err(Error::DegenerateFace(d));
            }
        }
        let mut side = BTreeMap::new();
        for chi in &f.chars {
            side.insert(chi.clone(), f.face.id().to_vec());
        }
        for chi in &g.chars {
            side.insert(chi.clone(), g.face.id().to_vec());
        }
        Ok(ToricWall {
            delta: delta.to_vec(),
            delta_prime: delta_prime.to_vec(),
            delta0: fwd.delta0,
            pivot: fwd.common.into_iter().collect(),
            face: f.face.clone(),
            dual_face: g.face.clone(),
            side,
        })
    }

    pub fn face_by_id(&self, id: &[usize]) -> Option<&FaceData> {
        [&self.face, &self.dual_face].into_iter().find(|f| f.id() == id)
    }

    pub fn pivot_module(&self) -> ModuleSpec {
        let mut m = ModuleSpec::cov(self.pivot.iter().cloned());
        m.provenance = Some("pivot".into());
        m
    }

    /// Mutation period `d_F⁺ + d_{F*}⁺ − 2`.
    pub fn period(&self) -> usize {
        self.face.d_plus + self.dual_face.d_plus - 2
    }

    /// Canonical atom for the `i`-th kernel of the chain starting at `χ`.
    pub fn ker_atom(&self, face: &[usize], chi: &[i64], i: usize) -> Result<Atom> {
        let f = self.face_by_id(face).ok_or_else(|| Error::NotAttached(format!("face {face:?}")))?;
        if self.side.get(chi).map(Vec::as_slice) != Some(face) {
            return Err(Error::NotAttached(format!("Ker({face:?}, {chi:?}, {i})")));
        }
        Ok(match i {
            0 => Atom::Cov { chi: chi.to_vec() },
            i if i == f.d_plus - 1 => Atom::Cov { chi: wadd(chi, &f.beta_plus) },
            i if i < f.d_plus - 1 => Atom::Ker { face: face.to_vec(), chi: chi.to_vec(), i },
            _ => return Err(Error::InvalidInput(format!("kernel index {i} exceeds d_plus − 1"))),
        })
    }

    /// Position of a non-pivot atom on its chain: `(face, χ, i)`.
    pub fn position(&self, atom: &Atom) -> Result<Option<(Vec<usize>, Weight, usize)>> {
        match atom {
            Atom::Cov { chi } if self.pivot.contains(chi) => Ok(None),
            Atom::Cov { chi } => match self.side.get(chi) {
                Some(face) => Ok(Some((face.clone(), chi.clone(), 0))),
                None => Err(Error::NotAttached(atom.to_string())),
            },
            Atom::Ker { face, chi, i } => {
                let f = self.face_by_id(face).ok_or_else(|| Error::NotAttached(atom.to_string()))?;
                if self.side.get(chi) != Some(face) || *i == 0 || *i + 1 >= f.d_plus {
                    return Err(Error::NotAttached(atom.to_string()));
                }
                Ok(Some((face.clone(), chi.clone(), *i)))
            }
        }
    }

    fn step_atom(&self, atom: &Atom, dir: Direction) -> Result<Atom> {
        let Some((face, chi, i)) = self.position(atom)? else { return Ok(atom.clone()) };
        match dir {
            Direction::Left => self.ker_atom(&face, &chi, i + 1),
            Direction::Right if i > 0 => self.ker_atom(&face, &chi, i - 1),
            Direction::Right => {
                // Cov(ψ) closes the chain starting at ψ − β_{F*} = ψ + β_{F_ψ}
                let f = self.face_by_id(&face).expect("face of an attached character");
                let start = wadd(&chi, &f.beta_plus);
                let g = self.side.get(&start).ok_or_else(|| Error::NotAttached(atom.to_string()))?;
                let d = self.face_by_id(g).expect("face of an attached character").d_plus;
                self.ker_atom(g, &start, d - 2)
            }
        }
    }
}

fn step(rep: &QSRep, wall: &ToricWall, spec: &ModuleSpec, dir: Direction) -> Result<ModuleSpec> {
    if !rep.root_datum.is_torus() {
        return Err(Error::NotToric);
    }
    let mut out = ModuleSpec::default();
    for (a, &c) in &spec.atoms {
        *out.atoms.entry(wall.step_atom(a, dir)?).or_default() += c;
    }
    out.provenance = Some(format!("{} mutation", if dir == Direction::Left { "left" } else { "right" }));
    Ok(out)
}

/// One left mutation at the pivot: every non-pivot atom advances one kernel step.
pub fn mutate_left(rep: &QSRep, spec: &ModuleSpec, wall: &ToricWall) -> Result<ModuleSpec> {
    step(rep, wall, spec, Direction::Left)
}

/// One right mutation at the pivot, inverse to [`mutate_left`].
pub fn mutate_right(rep: &QSRep, spec: &ModuleSpec, wall: &ToricWall) -> Result<ModuleSpec> {
    step(rep, wall, spec, Direction::Right)
}

/// The trace `spec, μ(spec), μ²(spec), …` of `steps` mutations.
pub fn mutate(rep: &QSRep, spec: &ModuleSpec, wall: &ToricWall, dir: Direction, steps: usize) -> Result<Vec<ModuleSpec>> {
    let mut trace = vec![spec.clone()];
    for _ in 0..steps {
        let next = step(rep, wall, trace.last().unwrap(), dir)?;
        trace.push(next);
    }
    Ok(trace)
}

/// Element of `ℤ[M]`.
pub type Class = BTreeMap<Weight, i64>;

fn class_add(a: &mut Class, b: &Class, k: i64) {
    for (w, &c) in b {
        *a.entry(w.clone()).or_default() += k * c;
    }
    a.retain(|_, c| *c != 0);
}

pub fn rank(c: &Class) -> i64 {
    c.values().sum()
}

/// `[T_j]` for the chain at `χ`: the weights `χ+β_S` over `j`-subsets `S` of `𝒲_F⁺`.
pub fn koszul_term(rep: &QSRep, f: &FaceData, chi: &[i64], j: usize) -> Class {
    let mut out = Class::new();
    for s in subsets(f.plus.len(), j) {
        let w = s.iter().fold(chi.to_vec(), |acc, &k| wadd(&acc, &rep.weights[f.plus[k]]));
        *out.entry(w).or_default() += 1;
    }
    out
}

/// The telescoped class `Σ_{j≤i} (−1)^{i−j} [T_j]` of the `i`-th kernel, without canonicalization.
pub fn ker_class(rep: &QSRep, f: &FaceData, chi: &[i64], i: usize) -> Class {
    let mut out = Class::new();
    for j in 0..=i {
        class_add(&mut out, &koszul_term(rep, f, chi, j), if (i - j) % 2 == 0 { 1 } else { -1 });
    }
    out
}

/// `Σ_j (−1)^j [T_j]`, which vanishes on the semistable locus.
pub fn koszul_relation(rep: &QSRep, f: &FaceData, chi: &[i64]) -> Class {
    let mut out = Class::new();
    for j in 0..=f.d_plus {
        class_add(&mut out, &koszul_term(rep, f, chi, j), if j % 2 == 0 { 1 } else { -1 });
    }
    out
}

/// Formal class of a spec in `ℤ[M]`.
pub fn virtual_class(rep: &QSRep, wall: &ToricWall, spec: &ModuleSpec) -> Result<Class> {
    if !rep.root_datum.is_torus() {
        return Err(Error::NotToric);
    }
    let mut out = Class::new();
    for (a, &c) in &spec.atoms {
        let piece = match a {
            Atom::Cov { chi } => Class::from([(chi.clone(), 1)]),
            Atom::Ker { face, chi, i } => {
                let f = wall.face_by_id(face).ok_or_else(|| Error::NotAttached(a.to_string()))?;
                ker_class(rep, f, chi, *i)
            }
        };
        class_add(&mut out, &piece, c as i64);
    }
    Ok(out)
}

/// Checks the short exact sequences `0 → Ker_{i−1} → T_i → Ker_i → 0` along every chain of the wall,
/// the ranks `C(d−1, i)`, and the endpoint identification modulo the Koszul relation.
pub fn telescoping_violations(rep: &QSRep, wall: &ToricWall) -> Vec<String> {
    let mut out = Vec::new();
    for (chi, face) in &wall.side {
        let f = wall.face_by_id(face).expect("attached face");
        let d = f.d_plus;
        for i in 0..d {
            let k = ker_class(rep, f, chi, i);
            if rank(&k) != binomial(d as u64 - 1, i as u64) as i64 {
                out.push(format!("rank of Ker({face:?}, {chi:?}, {i}) is {} not C({}, {i})", rank(&k), d - 1));
            }
            if i > 0 {
                let mut s = k.clone();
                class_add(&mut s, &ker_class(rep, f, chi, i - 1), 1);
                if s != koszul_term(rep, f, chi, i) {
                    out.push(format!("exact sequence fails at Ker({face:?}, {chi:?}, {i})"));
                }
            }
        }
        let mut diff = ker_class(rep, f, chi, d - 1);
        class_add(&mut diff, &Class::from([(wadd(chi, &f.beta_plus), 1)]), -1);
        let mut rel = koszul_relation(rep, f, chi);
        if (d - 1) % 2 == 1 {
            rel.values_mut().for_each(|c| *c = -*c);
        }
        if diff != rel || rank(&rel) != 0 {
            out.push(format!("endpoint of the chain at {chi:?} differs from Cov(χ+β) beyond the Koszul relation"));
        }
    }
    out
}

/// Checks one mutation step: pivot atoms are untouched, and each moved atom satisfies its exact sequence.
pub fn step_violations(rep: &QSRep, wall: &ToricWall, before: &ModuleSpec, dir: Direction) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for a in before.atoms.keys() {
        let b = wall.step_atom(a, dir)?;
        let Some((face, chi, i)) = wall.position(a)? else {
            if a != &b {
                out.push(format!("pivot atom {a} changed"));
            }
            continue;
        };
        let f = wall.face_by_id(&face).expect("attached face");
        // `a` sits at index i; `b` at i+1 (left) on the same chain, or closes the chain through a (right)
        let (lo, hi, chain_face, chain_chi) = match dir {
            Direction::Left => (i, i + 1, f, chi.clone()),
            Direction::Right if i > 0 => (i - 1, i, f, chi.clone()),
            Direction::Right => {
                let start = wadd(&chi, &f.beta_plus);
                let g = wall.face_by_id(&wall.side[&start]).expect("attached face");
                (g.d_plus - 2, g.d_plus - 1, g, start)
            }
        };
        let mut s = ker_class(rep, chain_face, &chain_chi, lo);
        class_add(&mut s, &ker_class(rep, chain_face, &chain_chi, hi), 1);
        if s != koszul_term(rep, chain_face, &chain_chi, hi) {
            out.push(format!("step {a} → {b} breaks the exact sequence"));
        }
        let expect_hi = wall.ker_atom(chain_face.id(), &chain_chi, hi)?;
        let expect_lo = wall.ker_atom(chain_face.id(), &chain_chi, lo)?;
        let (got_lo, got_hi) = if dir == Direction::Left { (a, &b) } else { (&b, a) };
        if got_lo != &expect_lo || got_hi != &expect_hi {
            out.push(format!("step {a} → {b} is not a single chain step"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationStep {
    pub direction: Direction,
    pub face: Vec<usize>,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationWord {
    pub delta: QVec,
    pub delta_prime: QVec,
    pub pivot: ModuleSpec,
    pub steps: Vec<MutationStep>,
    /// Toric: `d_F⁺ − 1`. Otherwise the largest per-face exchange count.
    pub total: usize,
    /// `(face, d_F⁺ + ℓ(w₀) − 1)` for each face of `ℱ_(δ,δ′)`.
    pub exchange_counts: Vec<(Vec<usize>, usize)>,
    pub executable: bool,
}

impl MutationWord {
    pub fn to_json(&self) -> Value {
        json!({
            "delta": crate::json::qvec(&self.delta),
            "delta_prime": crate::json::qvec(&self.delta_prime),
            "pivot": self.pivot.to_json(),
            "steps": self.steps,
            "total": self.total,
            "exchange_counts": self.exchange_counts.iter().map(|(f, c)| json!({"face": f, "count": c})).collect::<Vec<_>>(),
            "executable": self.executable,
        })
    }
}

/// The word carrying `M_δ` to `M_δ′` by left mutations at `M_{δ∩δ′}`.
pub fn mutation_word(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<MutationWord> {
    let c = wall_crossing(rep, arr, delta, delta_prime)?;
    let rd = &rep.root_datum;
    let l0 = rd.weyl[rd.w0].length;
    let exchange_counts: Vec<(Vec<usize>, usize)> =
        c.faces.iter().map(|f| (f.face.id().to_vec(), f.face.d_plus + l0 - 1)).collect();
    let mut pivot = ModuleSpec::cov(c.common.iter().cloned());
    pivot.provenance = Some("pivot".into());
    if rd.is_torus() {
        let wall = ToricWall::new(rep, arr, delta, delta_prime)?;
        let steps = (1..wall.face.d_plus)
            .map(|index| MutationStep { direction: Direction::Left, face: wall.face.id().to_vec(), index })
            .collect::<Vec<_>>();
        Ok(MutationWord {
            delta: delta.to_vec(),
            delta_prime: delta_prime.to_vec(),
            pivot,
            total: steps.len(),
            steps,
            exchange_counts,
            executable: true,
        })
    } else {
        Ok(MutationWord {
            delta: delta.to_vec(),
            delta_prime: delta_prime.to_vec(),
            pivot,
            steps: vec![],
            total: exchange_counts.iter().map(|e| e.1).max().unwrap_or(0),
            exchange_counts,
            executable: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeData {
    pub count: usize,
    pub l: BTreeSet<Weight>,
    pub n: BTreeSet<Weight>,
}

/// `d_F⁺ + ℓ(w₀) − 1` with the summand sets `(L_δ^F, N_δ^F)`.
pub fn exchange_count(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat], facets: &[usize]) -> Result<ExchangeData> {
    let c = wall_crossing(rep, arr, delta, delta_prime)?;
    let f = c
        .faces
        .iter()
        .find(|x| x.face.id() == facets)
        .ok_or_else(|| Error::InvalidInput(format!("face {facets:?} is not in ℱ_(δ,δ′)")))?;
    let rd = &rep.root_datum;
    let (l, n) = summand_sets(rep, arr, delta, delta_prime, facets)?;
    Ok(ExchangeData { count: f.face.d_plus + rd.weyl[rd.w0].length - 1, l, n })
}

/// Results of iterating left mutation from `M_δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityReport {
    pub period: usize,
    pub d_plus: usize,
    pub d_plus_dual: usize,
    /// First step at which `M_δ′` appears.
    pub reaches_target: Option<usize>,
    /// First step at which `M_δ` reappears.
    pub returns: Option<usize>,
    /// Right mutation of `M_δ′` by `d_F⁺ − 1` steps gives `M_δ`.
    pub right_inverse_ok: bool,
    pub failures: Vec<String>,
}

impl PeriodicityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
            && self.reaches_target == Some(self.d_plus - 1)
            && self.returns == Some(self.period)
            && self.right_inverse_ok
    }
}

pub fn check_periodicity(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<PeriodicityReport> {
    let wall = ToricWall::new(rep, arr, delta, delta_prime)?;
    let start = module_of_window(rep, arr, delta)?;
    let target = module_of_window(rep, arr, delta_prime)?;
    let period = wall.period();
    let mut failures = telescoping_violations(rep, &wall);
    let trace = mutate(rep, &start, &wall, Direction::Left, period)?;
    let reaches_target = trace.iter().position(|m| *m == target);
    let returns = trace.iter().skip(1).position(|m| *m == start).map(|k| k + 1);
    let pivot = wall.pivot_module();
    for (k, m) in trace.iter().enumerate() {
        failures.extend(step_violations(rep, &wall, m, Direction::Left)?);
        if m.len() != start.len() {
            failures.push(format!("step {k} changes the number of summands"));
        }
        if !pivot.atoms.keys().all(|a| m.atoms.contains_key(a)) {
            failures.push(format!("step {k} lost a pivot summand"));
        }
        let back = mutate_right(rep, &mutate_left(rep, m, &wall)?, &wall)?;
        if back != *m {
            failures.push(format!("right mutation does not invert left mutation at step {k}"));
        }
    }
    let right = mutate(rep, &target, &wall, Direction::Right, wall.face.d_plus - 1)?;
    let right_inverse_ok = right.last() == Some(&start);
    Ok(PeriodicityReport {
        period,
        d_plus: wall.face.d_plus,
        d_plus_dual: wall.dual_face.d_plus,
        reaches_target,
        returns,
        right_inverse_ok,
        failures,
    })
}

/// Shift every character of a spec by `m`.
pub fn shift(spec: &ModuleSpec, m: &[i64]) -> ModuleSpec {
    let mut out = ModuleSpec { provenance: spec.provenance.clone(), ..Default::default() };
    for (a, &c) in &spec.atoms {
        let b = match a {
            Atom::Cov { chi } => Atom::Cov { chi: wadd(chi, m) },
            Atom::Ker { face, chi, i } => Atom::Ker { face: face.clone(), chi: wadd(chi, m), i: *i },
        };
        *out.atoms.entry(b).or_default() += c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn torus(ws: &[i64]) -> (QSRep, Arrangement) {
        let rep = QSRep::from_torus(ws.iter().map(|&w| vec![w]).collect()).unwrap();
        let arr = Arrangement::build(&rep).unwrap();
        (rep, arr)
    }

    fn half(n: i128) -> Rat {
        Rat::new(n, 2)
    }

    #[test]
    fn windows_as_modules() {
        let (rep, arr) = torus(&[1, 1, -1, -1]);
        assert_eq!(module_of_window(&rep, &arr, &[half(1)]).unwrap(), ModuleSpec::cov([vec![0], vec![1]]));
        assert_eq!(module_of_window(&rep, &arr, &[half(3)]).unwrap(), ModuleSpec::cov([vec![1], vec![2]]));
        let m = module_of_window(&rep, &arr, &[half(1)]).unwrap();
        assert_eq!(module_of_window(&rep, &arr, &[half(7)]).unwrap(), shift(&m, &[3]));
    }

    #[test]
    fn left_mutation_examples() {
        let (rep, arr) = torus(&[1, 1, -1, -1]);
        let wall = ToricWall::new(&rep, &arr, &[half(1)], &[half(3)]).unwrap();
        assert_eq!(wall.pivot_module(), ModuleSpec::cov([vec![1]]));
        let m = module_of_window(&rep, &arr, &[half(1)]).unwrap();
        assert_eq!(mutate_left(&rep, &m, &wall).unwrap(), ModuleSpec::cov([vec![1], vec![2]]));

        let (rep, arr) = torus(&[1, 1, 1, -1, -1, -1]);
        let wall = ToricWall::new(&rep, &arr, &[q(0)], &[q(1)]).unwrap();
        let m = module_of_window(&rep, &arr, &[q(0)]).unwrap();
        assert_eq!(m, ModuleSpec::cov([vec![-1], vec![0], vec![1]]));
        let trace = mutate(&rep, &m, &wall, Direction::Left, 2).unwrap();
        let ker = Atom::Ker { face: wall.face.id().to_vec(), chi: vec![-1], i: 1 };
        assert!(trace[1].atoms.contains_key(&ker));
        assert_eq!(trace[2], ModuleSpec::cov([vec![0], vec![1], vec![2]]));
        assert_eq!(wall.period(), 4);
    }

    #[test]
    fn canonical_forms() {
        let (rep, arr) = torus(&[1, 1, 1, -1, -1, -1]);
        let wall = ToricWall::new(&rep, &arr, &[q(0)], &[q(1)]).unwrap();
        let f = wall.face.id().to_vec();
        assert_eq!(wall.ker_atom(&f, &[-1], 0).unwrap(), Atom::Cov { chi: vec![-1] });
        assert_eq!(wall.ker_atom(&f, &[-1], 2).unwrap(), Atom::Cov { chi: vec![2] });
        assert!(wall.ker_atom(&f, &[-1], 3).is_err());
        assert!(matches!(wall.ker_atom(&f, &[0], 1), Err(Error::NotAttached(_))));
        let stray = ModuleSpec::cov([vec![7]]);
        assert!(matches!(mutate_left(&rep, &stray, &wall), Err(Error::NotAttached(_))));
    }

    #[test]
    fn virtual_classes() {
        let (rep, arr) = torus(&[1, 1, -1, -1]);
        let wall = ToricWall::new(&rep, &arr, &[half(1)], &[half(3)]).unwrap();
        let k = ker_class(&rep, &wall.face, &[0], 1);
        assert_eq!(k, Class::from([(vec![0], -1), (vec![1], 2)]));
        assert!(telescoping_violations(&rep, &wall).is_empty());

        let (rep, arr) = torus(&[1, 1, 1, 1, -1, -1, -1, -1]);
        let wall = ToricWall::new(&rep, &arr, &[half(1)], &[half(3)]).unwrap();
        assert_eq!(wall.face.d_plus, 4);
        let chi = &module_of_window(&rep, &arr, &[half(1)]).unwrap().atoms.keys().next().cloned().unwrap();
        let Atom::Cov { chi } = chi else { panic!() };
        let ranks: Vec<i64> = (0..4).map(|i| rank(&ker_class(&rep, &wall.face, chi, i))).collect();
        assert_eq!(ranks, vec![1, 3, 3, 1]);
        assert!(telescoping_violations(&rep, &wall).is_empty());

        let a = ModuleSpec::cov([vec![0]]);
        let b = ModuleSpec::cov([vec![0], vec![1]]);
        let mut sum = virtual_class(&rep, &wall, &a).unwrap();
        class_add(&mut sum, &virtual_class(&rep, &wall, &b).unwrap(), 1);
        assert_eq!(sum, virtual_class(&rep, &wall, &a.union(&b)).unwrap());
    }

    #[test]
    fn periodicity() {
        for ws in [&[1, 1, -1, -1][..], &[1, 1, 1, -1, -1, -1], &[1, 1, 1, -1, -2], &[2, 1, 1, -1, -1, -2]] {
            let (rep, arr) = torus(ws);
            let (lo, hi) = arr.default_box(2);
            for (a, b) in arr.adjacent_pairs_in_box(&lo, &hi) {
                let r = check_periodicity(&rep, &arr, &a, &b).unwrap();
                assert!(r.ok(), "{ws:?} {a:?} {b:?}: {r:?}");
            }
        }
    }

    #[test]
    fn words_and_counts() {
        let (rep, arr) = torus(&[1, 1, -1, -1]);
        assert_eq!(mutation_word(&rep, &arr, &[half(1)], &[half(3)]).unwrap().total, 1);
        assert_eq!(mutation_word(&rep, &arr, &[half(3)], &[half(1)]).unwrap().total, 1);
        assert!(matches!(mutation_word(&rep, &arr, &[half(1)], &[half(5)]), Err(Error::NotAdjacent(2))));
        let e = exchange_count(&rep, &arr, &[half(1)], &[half(3)], ToricWall::new(&rep, &arr, &[half(1)], &[half(3)]).unwrap().face.id()).unwrap();
        assert_eq!(e.count, 1);

        let (rep, arr) = torus(&[1, 1, 1, -1, -1, -1]);
        let w = mutation_word(&rep, &arr, &[q(0)], &[q(1)]).unwrap();
        assert_eq!(w.total, 2);
        assert_eq!(w.exchange_counts[0].1, 2);
    }

    #[test]
    fn gl2_counts_only() {
        let rep = crate::catalog::gl2_sym3();
        let arr = Arrangement::build(&rep).unwrap();
        let d = vec![q(0), q(0)];
        let e = vec![q(1), q(1)];
        let w = mutation_word(&rep, &arr, &d, &e).unwrap();
        assert!(!w.executable);
        let mut counts: Vec<usize> = w.exchange_counts.iter().map(|c| c.1).collect();
        counts.sort();
        // d_F⁺ = 3 and 4, ℓ(w₀) = 1
        assert_eq!(counts, vec![3, 4]);
        assert!(matches!(ToricWall::new(&rep, &arr, &d, &e), Err(Error::NotToric)));
    }
}
