//! Labeled arrows between chambers, paths, the relations R1–R5, rank-one word reduction
//! and mutation transcripts of paths.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::{Rng, RngExt};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arrangement::{Arrangement, Wall};
use crate::error::{Error, Result};
use crate::linalg::{fmt_qvec, q, qadd, qdot_i, qscale, qsub, qv, sign, wadd, QVec, Rat, Weight};
use crate::mutation::{module_of_window, mutate, mutation_word, shift, Direction, ToricWall};
use crate::rep::QSRep;
use crate::windows::{wall_crossing, window};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arrow {
    Cross { from: QVec, to: QVec, label: QVec },
    Translate { m: Weight },
}

impl Arrow {
    pub fn to_json(&self) -> Value {
        match self {
            Arrow::Cross { from, to, label } => json!({
                "kind": "cross",
                "from": crate::json::qvec(from),
                "to": crate::json::qvec(to),
                "label": crate::json::qvec(label),
            }),
            Arrow::Translate { m } => json!({"kind": "translate", "m": m}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: QVec,
    pub arrows: Vec<Arrow>,
}

fn path_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Path(msg.into()))
}

impl Path {
    pub fn new(start: QVec) -> Path {
        Path { start, arrows: vec![] }
    }

    /// Builds a path of crossings through the given points, each labeled by its own direction.
    pub fn through(points: &[QVec]) -> Path {
        let mut p = Path::new(points[0].clone());
        for w in points.windows(2) {
            p.arrows.push(Arrow::Cross { from: w[0].clone(), to: w[1].clone(), label: qsub(&w[1], &w[0]) });
        }
        p
    }

    /// Checks composability and genericity, returning the current point before each arrow and the end point.
    pub fn validate(&self, arr: &Arrangement) -> Result<(Vec<QVec>, QVec)> {
        arr.chamber_of(&self.start)?;
        let mut cur = self.start.clone();
        let mut before = Vec::with_capacity(self.arrows.len());
        for (i, a) in self.arrows.iter().enumerate() {
            before.push(cur.clone());
            match a {
                Arrow::Cross { from, to, label } => {
                    if !arr.same_chamber(&cur, from)? {
                        return path_err(format!("arrow {i} does not start in the current chamber"));
                    }
                    arr.chamber_of(to)?;
                    if !arr.is_generic_ell(label)? {
                        return path_err(format!("label {} of arrow {i} is not generic", fmt_qvec(label)));
                    }
                    cur = to.clone();
                }
                Arrow::Translate { m } => {
                    let t = arr.coords(&qv(m))?;
                    if t.iter().any(|x| !x.is_integer()) {
                        return path_err(format!("{m:?} is not in the invariant lattice"));
                    }
                    cur = qadd(&cur, &qv(m));
                }
            }
        }
        Ok((before, cur))
    }

    pub fn end(&self, arr: &Arrangement) -> Result<QVec> {
        Ok(self.validate(arr)?.1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": crate::json::qvec(&self.start),
            "arrows": self.arrows.iter().map(Arrow::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Whether `[δ] →ℓ [δ′]` is positive: distinct chambers and `ℓ` oriented like `δ′−δ` on every separating wall.
pub fn is_positive_arrow(arr: &Arrangement, from: &[Rat], to: &[Rat], label: &[Rat]) -> Result<bool> {
    if arr.same_chamber(from, to)? {
        return Ok(false);
    }
    let dir = qsub(to, from);
    for w in arr.separating(from, to)? {
        if arr.orientation(label, &w)? != arr.orientation(&dir, &w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_positive(arr: &Arrangement, path: &Path) -> Result<bool> {
    path.validate(arr)?;
    for a in &path.arrows {
        match a {
            Arrow::Cross { from, to, label } => {
                if !is_positive_arrow(arr, from, to, label)? {
                    return Ok(false);
                }
            }
            Arrow::Translate { .. } => return Ok(false),
        }
    }
    Ok(true)
}

/// The four equivalent characterizations of minimality, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub distance_sum: bool,
    pub disjoint_union: bool,
    pub pairwise_disjoint: bool,
    pub orientation: bool,
}

impl MinimalityReport {
    pub fn agree(&self) -> bool {
        let v = self.distance_sum;
        self.disjoint_union == v && self.pairwise_disjoint == v && self.orientation == v
    }
}

pub fn minimality_report(arr: &Arrangement, path: &Path) -> Result<MinimalityReport> {
    if !is_positive(arr, path)? {
        return path_err("minimality is defined for positive paths");
    }
    let steps: Vec<(&QVec, &QVec, &QVec)> = path
        .arrows
        .iter()
        .map(|a| match a {
            Arrow::Cross { from, to, label } => (from, to, label),
            Arrow::Translate { .. } => unreachable!("positive paths have no translations"),
        })
        .collect();
    let Some(first) = steps.first() else {
        return Ok(MinimalityReport { distance_sum: true, disjoint_union: true, pairwise_disjoint: true, orientation: true });
    };
    let (d0, dm) = (first.0, steps.last().unwrap().1);
    let total = arr.separating(d0, dm)?;
    let seps: Vec<BTreeSet<Wall>> = steps.iter().map(|(a, b, _)| arr.separating(a, b)).collect::<Result<_>>()?;
    let sum: usize = seps.iter().map(BTreeSet::len).sum();
    let union: BTreeSet<Wall> = seps.iter().flatten().cloned().collect();
    let mut pairwise_disjoint = true;
    for i in 0..seps.len() {
        for j in (i + 1)..seps.len() {
            if !seps[i].is_disjoint(&seps[j]) {
                pairwise_disjoint = false;
            }
        }
    }
    let dir = qsub(dm, d0);
    let mut orientation = true;
    for ((_, _, label), s) in steps.iter().zip(&seps) {
        for w in s {
            if arr.orientation(label, w)? != arr.orientation(&dir, w)? {
                orientation = false;
            }
        }
    }
    Ok(MinimalityReport {
        distance_sum: total.len() == sum,
        disjoint_union: union == total && union.len() == sum,
        pairwise_disjoint,
        orientation,
    })
}

/// Minimality of a positive path; errors if the characterizations disagree.
pub fn is_minimal(arr: &Arrangement, path: &Path) -> Result<bool> {
    let r = minimality_report(arr, path)?;
    if !r.agree() {
        return Err(Error::Inconsistent(format!("minimality criteria disagree: {r:?}")));
    }
    Ok(r.distance_sum)
}

/// A rewrite by one of the relations, or its inverse, at an arrow position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rewrite {
    /// Drop an arrow inside one chamber.
    R1 { pos: usize },
    /// Insert an identity arrow with the given label.
    R1Inv { pos: usize, label: QVec },
    /// Merge two crossings with a common label.
    R2 { pos: usize },
    /// Split a crossing at an intermediate point.
    R2Inv { pos: usize, mid: QVec },
    /// Replace a label by one with the same orientations on the separating walls.
    R3 { pos: usize, label: QVec },
    /// `→ℓ ⇝m` becomes `⇝m →ℓ`.
    R4 { pos: usize },
    /// `⇝m →ℓ` becomes `→ℓ ⇝m`.
    R4Inv { pos: usize },
    /// Merge two translations.
    R5 { pos: usize },
    /// Split a translation off.
    R5Inv { pos: usize, m: Weight },
}

pub fn apply_relation(arr: &Arrangement, path: &Path, rule: &Rewrite) -> Result<Path> {
    let (before, _) = path.validate(arr)?;
    let mut out = path.clone();
    let a = &mut out.arrows;
    let bad = |what: &str| Error::Path(format!("{what} does not apply here"));
    match rule {
        Rewrite::R1 { pos } => match a.get(*pos) {
            Some(Arrow::Cross { from, to, .. }) if arr.same_chamber(from, to)? => {
                a.remove(*pos);
            }
            _ => return Err(bad("R1")),
        },
        Rewrite::R1Inv { pos, label } => {
            let cur = if *pos < before.len() { before[*pos].clone() } else { path.end(arr)? };
            if *pos > a.len() || !arr.is_generic_ell(label)? {
                return Err(bad("R1⁻¹"));
            }
            a.insert(*pos, Arrow::Cross { from: cur.clone(), to: cur, label: label.clone() });
        }
        Rewrite::R2 { pos } => match (a.get(*pos), a.get(pos + 1)) {
            (Some(Arrow::Cross { from, label, .. }), Some(Arrow::Cross { to, label: l2, .. })) if label == l2 => {
                let merged = Arrow::Cross { from: from.clone(), to: to.clone(), label: label.clone() };
                a.splice(*pos..pos + 2, [merged]);
            }
            _ => return Err(bad("R2")),
        },
        Rewrite::R2Inv { pos, mid } => match a.get(*pos).cloned() {
            Some(Arrow::Cross { from, to, label }) => {
                arr.chamber_of(mid)?;
                let first = Arrow::Cross { from, to: mid.clone(), label: label.clone() };
                let second = Arrow::Cross { from: mid.clone(), to, label };
                a.splice(*pos..pos + 1, [first, second]);
            }
            _ => return Err(bad("R2⁻¹")),
        },
        Rewrite::R3 { pos, label: new } => match a.get_mut(*pos) {
            Some(Arrow::Cross { from, to, label }) => {
                if !arr.is_generic_ell(new)? {
                    return Err(bad("R3"));
                }
                for w in arr.separating(from, to)? {
                    if arr.orientation(new, &w)? != arr.orientation(label, &w)? {
                        return Err(bad("R3"));
                    }
                }
                *label = new.clone();
            }
            _ => return Err(bad("R3")),
        },
        Rewrite::R4 { pos } => match (a.get(*pos).cloned(), a.get(pos + 1).cloned()) {
            (Some(Arrow::Cross { from, to, label }), Some(Arrow::Translate { m })) => {
                let cross = Arrow::Cross { from: qadd(&from, &qv(&m)), to: qadd(&to, &qv(&m)), label };
                a.splice(*pos..pos + 2, [Arrow::Translate { m }, cross]);
            }
            _ => return Err(bad("R4")),
        },
        Rewrite::R4Inv { pos } => match (a.get(*pos).cloned(), a.get(pos + 1).cloned()) {
            (Some(Arrow::Translate { m }), Some(Arrow::Cross { from, to, label })) => {
                let cross = Arrow::Cross { from: qsub(&from, &qv(&m)), to: qsub(&to, &qv(&m)), label };
                a.splice(*pos..pos + 2, [cross, Arrow::Translate { m }]);
            }
            _ => return Err(bad("R4⁻¹")),
        },
        Rewrite::R5 { pos } => match (a.get(*pos).cloned(), a.get(pos + 1).cloned()) {
            (Some(Arrow::Translate { m }), Some(Arrow::Translate { m: m2 })) => {
                a.splice(*pos..pos + 2, [Arrow::Translate { m: wadd(&m, &m2) }]);
            }
            _ => return Err(bad("R5")),
        },
        Rewrite::R5Inv { pos, m: part } => match a.get(*pos).cloned() {
            Some(Arrow::Translate { m }) => {
                let rest: Weight = m.iter().zip(part).map(|(x, y)| x - y).collect();
                a.splice(*pos..pos + 1, [Arrow::Translate { m: part.clone() }, Arrow::Translate { m: rest }]);
            }
            _ => return Err(bad("R5⁻¹")),
        },
    }
    out.validate(arr)?;
    Ok(out)
}

/// The walls of a rank-one arrangement, indexed relative to a base chamber:
/// chamber `c` lies between walls `c` and `c+1`, and chamber 0 contains the base point.
#[derive(Debug, Clone)]
pub struct Rank1Walls {
    /// Wall positions in `[0, 1)` of the invariant coordinate.
    pub values: Vec<Rat>,
    origin: i64,
    basis: Weight,
}

impl Rank1Walls {
    pub fn new(arr: &Arrangement, base: &[Rat]) -> Result<Rank1Walls> {
        if arr.dim() != 1 {
            return path_err(format!("word reduction needs a rank-one arrangement, got rank {}", arr.dim()));
        }
        let mut values = BTreeSet::new();
        for f in &arr.families {
            let nu = q(f.normal[0]);
            // t = (base + step·j)/ν ranges over [0,1) for base + step·j in [0, ν)
            let jmax = ((nu - f.base_offset) / f.offset_step).ceil().to_integer();
            for j in 0..jmax {
                let v = (f.base_offset + f.offset_step * Rat::from_integer(j)) / nu;
                if v >= Rat::zero() && v < q(1) {
                    values.insert(v);
                }
            }
        }
        let mut w = Rank1Walls { values: values.into_iter().collect(), origin: 0, basis: arr.basis[0].clone() };
        let t0 = arr.chamber_of(base)?.sample[0];
        w.origin = w.global_count(t0);
        Ok(w)
    }

    /// Walls per unit translation.
    pub fn per_period(&self) -> i64 {
        self.values.len() as i64
    }

    fn global_count(&self, t: Rat) -> i64 {
        let fl = t.floor();
        let fr = t - fl;
        fl.to_integer() as i64 * self.per_period() + self.values.iter().filter(|v| **v < fr).count() as i64
    }

    /// Position of wall `k`.
    pub fn wall(&self, k: i64) -> Rat {
        let j = self.origin + k - 1;
        let r = self.per_period();
        self.values[j.rem_euclid(r) as usize] + Rat::from_integer(j.div_euclid(r) as i128)
    }

    pub fn chamber_index(&self, arr: &Arrangement, delta: &[Rat]) -> Result<i64> {
        let t = arr.chamber_of(delta)?.sample[0];
        Ok(self.global_count(t) - self.origin)
    }

    /// Canonical sample point of chamber `c`, in full coordinates.
    pub fn sample(&self, arr: &Arrangement, c: i64) -> QVec {
        arr.point(&[(self.wall(c) + self.wall(c + 1)) / q(2)])
    }

    /// Full-coordinate vector of invariant coordinate `s`.
    pub fn unit(&self, s: i64) -> Weight {
        self.basis.iter().map(|b| b * s).collect()
    }
}

/// One elementary crossing of wall `wall` along the arc on side `side` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub wall: i64,
    pub side: i8,
    pub forward: bool,
}

/// Normal form in rank one: a freely reduced edge word followed by one translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank1Word {
    pub edges: Vec<Edge>,
    pub shift: i64,
}

fn push_edge(stack: &mut Vec<Edge>, e: Edge) {
    match stack.last() {
        Some(t) if t.wall == e.wall && t.side == e.side && t.forward != e.forward => {
            stack.pop();
        }
        _ => stack.push(e),
    }
}

/// The rank-one normal form of a path, with walls indexed from the chamber of its start.
pub fn rank1_word(arr: &Arrangement, path: &Path) -> Result<Rank1Word> {
    let walls = Rank1Walls::new(arr, &path.start)?;
    path.validate(arr)?;
    let r = walls.per_period();
    let mut stack = Vec::new();
    let mut shift = 0i64;
    for a in &path.arrows {
        match a {
            Arrow::Cross { from, to, label } => {
                let cf = walls.chamber_index(arr, from)?;
                let ct = walls.chamber_index(arr, to)?;
                let side = sign(&arr.coords(label)?[0]);
                if ct > cf {
                    for k in (cf + 1)..=ct {
                        push_edge(&mut stack, Edge { wall: k - shift * r, side, forward: true });
                    }
                } else {
                    for k in ((ct + 1)..=cf).rev() {
                        push_edge(&mut stack, Edge { wall: k - shift * r, side, forward: false });
                    }
                }
            }
            Arrow::Translate { m } => {
                let t = arr.coords(&qv(m))?[0];
                shift += t.to_integer() as i64;
            }
        }
    }
    Ok(Rank1Word { edges: stack, shift })
}

/// Rebuilds a path from a normal form, using canonical chamber samples.
pub fn word_to_path(arr: &Arrangement, base: &[Rat], word: &Rank1Word) -> Result<Path> {
    let walls = Rank1Walls::new(arr, base)?;
    let mut p = Path::new(walls.sample(arr, 0));
    for e in &word.edges {
        let (a, b) = if e.forward { (e.wall - 1, e.wall) } else { (e.wall, e.wall - 1) };
        p.arrows.push(Arrow::Cross {
            from: walls.sample(arr, a),
            to: walls.sample(arr, b),
            label: qv(&walls.unit(e.side as i64)),
        });
    }
    if word.shift != 0 {
        p.arrows.push(Arrow::Translate { m: walls.unit(word.shift) });
    }
    Ok(p)
}

/// Cancels inverse crossings and merges translations; only for rank-one arrangements.
pub fn reduce_rank1(arr: &Arrangement, path: &Path) -> Result<Path> {
    let w = rank1_word(arr, path)?;
    word_to_path(arr, &path.start, &w)
}

/// Parses `x(k,±[,±]);t(m);…` relative to the chamber of `start`. The optional third
/// argument of `x` is the side of the label and defaults to `+`.
pub fn parse_path(arr: &Arrangement, start: &[Rat], s: &str) -> Result<Path> {
    let walls = Rank1Walls::new(arr, start)?;
    let mut p = Path::new(start.to_vec());
    let mut c = 0i64;
    let mut cur = start.to_vec();
    for tok in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Error::Path(format!("cannot parse {tok:?}"));
        let (head, rest) = tok.split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').map(str::trim).collect();
        let pm = |x: &str| match x {
            "+" => Ok(1i64),
            "-" => Ok(-1),
            _ => Err(bad()),
        };
        match (head.trim(), args.as_slice()) {
            ("x", [k, d, rest @ ..]) if rest.len() <= 1 => {
                let k: i64 = k.parse().map_err(|_| bad())?;
                let dir = pm(d)?;
                let side = rest.first().map_or(Ok(1), |x| pm(x))?;
                let (from, to) = if dir > 0 { (k - 1, k) } else { (k, k - 1) };
                if from != c {
                    return path_err(format!("{tok}: wall {k} does not bound the current chamber {c}"));
                }
                p.arrows.push(Arrow::Cross { from: walls.sample(arr, from), to: walls.sample(arr, to), label: qv(&walls.unit(side)) });
                c = to;
                cur = walls.sample(arr, to);
            }
            ("t", [m]) => {
                let m: i64 = m.parse().map_err(|_| bad())?;
                p.arrows.push(Arrow::Translate { m: walls.unit(m) });
                c += m * walls.per_period();
                cur = qadd(&cur, &qv(&walls.unit(m)));
            }
            _ => return Err(bad()),
        }
    }
    p.validate(arr)?;
    Ok(p)
}

pub fn format_word(w: &Rank1Word) -> String {
    let mut parts: Vec<String> = w
        .edges
        .iter()
        .map(|e| format!("x({},{},{})", e.wall, if e.forward { '+' } else { '-' }, if e.side > 0 { '+' } else { '-' }))
        .collect();
    if w.shift != 0 {
        parts.push(format!("t({})", w.shift));
    }
    parts.join(";")
}

/// One elementary crossing of a path: adjacent points and whether the label agrees with the direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryCrossing {
    pub from: QVec,
    pub to: QVec,
    pub positive: bool,
}

/// Splits a crossing arrow into adjacent crossings along its segment.
pub fn elementary_crossings(arr: &Arrangement, from: &[Rat], to: &[Rat], label: &[Rat]) -> Result<Vec<ElementaryCrossing>> {
    let walls = arr.separating(from, to)?;
    let (ta, tb) = (arr.coords(from)?, arr.coords(to)?);
    let mut params: Vec<(Rat, Wall)> = walls
        .into_iter()
        .map(|w| {
            let (va, vb) = (qdot_i(&ta, &w.normal), qdot_i(&tb, &w.normal));
            ((w.value - va) / (vb - va), w)
        })
        .collect();
    params.sort();
    if params.windows(2).any(|p| p[0].0 == p[1].0) {
        return path_err(format!("segment {} → {} meets an intersection of walls", fmt_qvec(from), fmt_qvec(to)));
    }
    let dir = qsub(to, from);
    let mut stops = vec![Rat::zero()];
    for w in params.windows(2) {
        stops.push((w[0].0 + w[1].0) / q(2));
    }
    stops.push(q(1));
    let at = |s: Rat| if s.is_zero() { from.to_vec() } else if s == q(1) { to.to_vec() } else { qadd(from, &qscale(&dir, s)) };
    let mut out = Vec::new();
    for (k, (_, w)) in params.iter().enumerate() {
        out.push(ElementaryCrossing {
            from: at(stops[k]),
            to: at(stops[k + 1]),
            positive: arr.orientation(label, w)? == arr.orientation(&dir, w)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptEntry {
    Mutation { from: QVec, to: QVec, direction: Direction, steps: usize, pivot: Vec<Weight>, executable: bool },
    Shift { m: Weight },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    pub start_window: Vec<Weight>,
    pub end_window: Vec<Weight>,
    /// Image of each character of the start window under the composed bijections.
    pub image: BTreeMap<Weight, Weight>,
    pub failures: Vec<String>,
}

impl Transcript {
    pub fn coherent(&self) -> bool {
        self.failures.is_empty()
    }

    /// Net number of left steps (right steps count negatively).
    pub fn net_steps(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| match e {
                TranscriptEntry::Mutation { direction: Direction::Left, steps, .. } => *steps as i64,
                TranscriptEntry::Mutation { steps, .. } => -(*steps as i64),
                TranscriptEntry::Shift { .. } => 0,
            })
            .sum()
    }

    pub fn total_steps(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match e {
                TranscriptEntry::Mutation { steps, .. } => *steps,
                TranscriptEntry::Shift { .. } => 0,
            })
            .sum()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| match e {
                TranscriptEntry::Mutation { direction: Direction::Left, steps, .. } => format!("Φ^{steps}"),
                TranscriptEntry::Mutation { steps, .. } => format!("Φ^-{steps}"),
                TranscriptEntry::Shift { m } => format!("⊗O({m:?})"),
            })
            .collect();
        parts.join("·")
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| match e {
                TranscriptEntry::Mutation { from, to, direction, steps, pivot, executable } => json!({
                    "kind": "mutation",
                    "from": crate::json::qvec(from),
                    "to": crate::json::qvec(to),
                    "direction": direction,
                    "steps": steps,
                    "pivot": pivot,
                    "executable": executable,
                }),
                TranscriptEntry::Shift { m } => json!({"kind": "shift", "m": m}),
            })
            .collect();
        json!({
            "entries": entries,
            "label": self.label(),
            "total_steps": self.total_steps(),
            "start_window": self.start_window,
            "end_window": self.end_window,
            "image": self.image.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "coherent": self.coherent(),
            "failures": self.failures,
        })
    }
}

/// Mutation words and window shifts along a path, with the composed window bijection checked
/// against the target window and, for tori, the mutations executed on module specs.
pub fn mutation_transcript(rep: &QSRep, arr: &Arrangement, path: &Path) -> Result<Transcript> {
    let (_, end) = path.validate(arr)?;
    let toric = rep.root_datum.is_torus();
    let start_window = window(rep, arr, &path.start)?.chars;
    let mut image: BTreeMap<Weight, Weight> = start_window.iter().map(|c| (c.clone(), c.clone())).collect();
    let mut module = if toric { Some(module_of_window(rep, arr, &path.start)?) } else { None };
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    let mut cur = path.start.clone();
    for a in &path.arrows {
        match a {
            Arrow::Cross { from, to, label } => {
                for e in elementary_crossings(arr, from, to, label)? {
                    let (word, direction) = if e.positive {
                        (mutation_word(rep, arr, &e.from, &e.to)?, Direction::Left)
                    } else {
                        (mutation_word(rep, arr, &e.to, &e.from)?, Direction::Right)
                    };
                    let c = wall_crossing(rep, arr, &e.from, &e.to)?;
                    for v in image.values_mut() {
                        *v = match c.mu(v) {
                            Some(x) => x.clone(),
                            None => v.clone(),
                        };
                    }
                    if let Some(m) = module.as_mut() {
                        let wall = ToricWall::new(rep, arr, &e.from, &e.to)?;
                        let here = module_of_window(rep, arr, &e.from)?;
                        if *m != here {
                            failures.push(format!("module before crossing at {} is not M_δ", fmt_qvec(&e.from)));
                        }
                        let trace = mutate(rep, &here, &wall, direction, word.total)?;
                        *m = trace.last().cloned().unwrap();
                        if *m != module_of_window(rep, arr, &e.to)? {
                            failures.push(format!("mutation word does not reach M_δ′ at {}", fmt_qvec(&e.to)));
                        }
                    }
                    let pivot = word.pivot.atoms.keys().filter_map(|x| match x {
                        crate::mutation::Atom::Cov { chi } => Some(chi.clone()),
                        _ => None,
                    });
                    entries.push(TranscriptEntry::Mutation {
                        from: e.from,
                        to: e.to,
                        direction,
                        steps: word.total,
                        pivot: pivot.collect(),
                        executable: word.executable,
                    });
                }
                cur = to.clone();
            }
            Arrow::Translate { m } => {
                for v in image.values_mut() {
                    *v = wadd(v, m);
                }
                if let Some(md) = module.as_mut() {
                    *md = shift(md, m);
                }
                entries.push(TranscriptEntry::Shift { m: m.clone() });
                cur = qadd(&cur, &qv(m));
            }
        }
    }
    let end_window = window(rep, arr, &end)?.chars;
    let mut imgs: Vec<Weight> = image.values().cloned().collect();
    imgs.sort();
    imgs.dedup();
    if imgs != end_window || imgs.len() != start_window.len() {
        failures.push("composed window maps do not give a bijection onto the target window".into());
    }
    if let Some(m) = &module {
        if *m != module_of_window(rep, arr, &end)? {
            failures.push("executed mutations do not end at the target module".into());
        }
    }
    Ok(Transcript { entries, start_window, end_window, image, failures })
}

/// A random point of the box `[lo, hi]` (invariant coordinates) off every wall, in full coordinates.
pub fn random_point<R: Rng + ?Sized>(arr: &Arrangement, rng: &mut R, lo: &[Rat], hi: &[Rat]) -> QVec {
    loop {
        let t: QVec = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| {
                let den = rng.random_range(2..=24i128);
                let s = Rat::new(rng.random_range(1..den), den);
                a + (b - a) * s
            })
            .collect();
        if arr.walls_through(&t).is_empty() {
            return arr.point(&t);
        }
    }
}

/// A random generic label in full coordinates with small entries.
pub fn random_label<R: Rng + ?Sized>(arr: &Arrangement, rng: &mut R) -> QVec {
    loop {
        let t: QVec = (0..arr.dim()).map(|_| Rat::new(rng.random_range(-9..=9i128), rng.random_range(1..=5i128))).collect();
        let l = arr.point(&t);
        if arr.is_generic_ell(&l).unwrap_or(false) {
            return l;
        }
    }
}

/// A random positive path of `len` arrows inside the box.
pub fn random_positive_path<R: Rng + ?Sized>(arr: &Arrangement, rng: &mut R, lo: &[Rat], hi: &[Rat], len: usize) -> Path {
    let mut pts = vec![random_point(arr, rng, lo, hi)];
    let mut arrows = Vec::new();
    while arrows.len() < len {
        let from = pts.last().unwrap().clone();
        let to = random_point(arr, rng, lo, hi);
        if arr.same_chamber(&from, &to).unwrap_or(true) {
            continue;
        }
        let dir = qsub(&to, &from);
        // the direction itself, or a random label that happens to be positive
        let label = if rng.random_bool(0.5) && arr.is_generic_ell(&dir).unwrap_or(false) { dir } else { random_label(arr, rng) };
        if is_positive_arrow(arr, &from, &to, &label).unwrap_or(false) {
            arrows.push(Arrow::Cross { from, to: to.clone(), label });
            pts.push(to);
        }
    }
    Path { start: pts[0].clone(), arrows }
}

/// A random minimal positive path from `a` to `b` in rank one, through random intermediate points.
pub fn random_minimal_path<R: Rng + ?Sized>(arr: &Arrangement, rng: &mut R, a: &[Rat], b: &[Rat], stops: usize) -> Path {
    let (ta, tb) = (arr.coords(a).unwrap()[0], arr.coords(b).unwrap()[0]);
    let mut ts: Vec<Rat> = (0..stops)
        .map(|_| {
            let den = rng.random_range(2..=30i128);
            ta + (tb - ta) * Rat::new(rng.random_range(1..den), den)
        })
        .filter(|t| arr.walls_through(&[*t]).is_empty())
        .collect();
    ts.sort();
    if tb < ta {
        ts.reverse();
    }
    let mut pts = vec![a.to_vec()];
    pts.extend(ts.iter().map(|t| arr.point(&[*t])));
    pts.push(b.to_vec());
    let mut p = Path::new(a.to_vec());
    for w in pts.windows(2) {
        if arr.same_chamber(&w[0], &w[1]).unwrap() {
            continue;
        }
        let from = match p.arrows.last() {
            Some(Arrow::Cross { to, .. }) => to.clone(),
            _ => a.to_vec(),
        };
        let scale = Rat::new(rng.random_range(1..=7i128), rng.random_range(1..=7i128));
        let label = qscale(&qsub(b, a), scale);
        p.arrows.push(Arrow::Cross { from, to: w[1].clone(), label });
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::torus1;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn h(n: i128) -> QVec {
        vec![Rat::new(n, 2)]
    }

    fn setup() -> (QSRep, Arrangement) {
        let rep = torus1(&[1, 1, -1, -1]).unwrap();
        let arr = Arrangement::build(&rep).unwrap();
        (rep, arr)
    }

    fn cross(a: i128, b: i128, l: i128) -> Arrow {
        Arrow::Cross { from: h(a), to: h(b), label: vec![Rat::from_integer(l)] }
    }

    #[test]
    fn positivity() {
        let (_, arr) = setup();
        assert!(is_positive_arrow(&arr, &h(1), &h(3), &[q(1)]).unwrap());
        assert!(!is_positive_arrow(&arr, &h(1), &h(3), &[q(-1)]).unwrap());
        assert!(!is_positive_arrow(&arr, &h(1), &[Rat::new(3, 4)], &[q(1)]).unwrap());
        let p = Path { start: h(1), arrows: vec![cross(1, 3, 1), Arrow::Translate { m: vec![1] }] };
        assert!(!is_positive(&arr, &p).unwrap());
    }

    #[test]
    fn minimality_examples() {
        let (_, arr) = setup();
        let p = Path { start: h(1), arrows: vec![cross(1, 3, 1), cross(3, 5, 1)] };
        assert!(is_minimal(&arr, &p).unwrap());
        let p = Path { start: h(1), arrows: vec![cross(1, 3, 1), cross(3, 1, -1)] };
        assert!(!is_minimal(&arr, &p).unwrap());
        let p = Path { start: h(1), arrows: vec![cross(1, 5, 1)] };
        assert!(is_minimal(&arr, &p).unwrap());
        let p = Path { start: h(1), arrows: vec![cross(1, 3, -1)] };
        assert!(matches!(is_minimal(&arr, &p), Err(Error::Path(_))));
    }

    #[test]
    fn relations() {
        let (_, arr) = setup();
        let p = Path { start: h(1), arrows: vec![Arrow::Cross { from: h(1), to: vec![Rat::new(3, 4)], label: vec![q(1)] }] };
        assert!(apply_relation(&arr, &p, &Rewrite::R1 { pos: 0 }).unwrap().arrows.is_empty());
        let p = Path { start: h(1), arrows: vec![cross(1, 3, 1), cross(3, 5, 1)] };
        let merged = apply_relation(&arr, &p, &Rewrite::R2 { pos: 0 }).unwrap();
        assert_eq!(merged.arrows, vec![cross(1, 5, 1)]);
        let split = apply_relation(&arr, &merged, &Rewrite::R2Inv { pos: 0, mid: h(3) }).unwrap();
        assert_eq!(split, p);
        assert!(apply_relation(&arr, &Path { start: h(1), arrows: vec![cross(1, 3, 1), cross(3, 5, 2)] }, &Rewrite::R2 { pos: 0 }).is_err());
        let r3 = apply_relation(&arr, &p, &Rewrite::R3 { pos: 0, label: vec![q(7)] }).unwrap();
        assert_eq!(rank1_word(&arr, &r3).unwrap(), rank1_word(&arr, &p).unwrap());
        assert!(apply_relation(&arr, &p, &Rewrite::R3 { pos: 0, label: vec![q(-1)] }).is_err());
        let t = Path { start: h(1), arrows: vec![cross(1, 3, 1), Arrow::Translate { m: vec![2] }] };
        let swapped = apply_relation(&arr, &t, &Rewrite::R4 { pos: 0 }).unwrap();
        assert_eq!(swapped.arrows[1], cross(5, 7, 1));
        assert_eq!(apply_relation(&arr, &swapped, &Rewrite::R4Inv { pos: 0 }).unwrap(), t);
        assert_eq!(swapped.end(&arr).unwrap(), t.end(&arr).unwrap());
        assert_eq!(rank1_word(&arr, &swapped).unwrap(), rank1_word(&arr, &t).unwrap());
        let tt = Path { start: h(1), arrows: vec![Arrow::Translate { m: vec![1] }, Arrow::Translate { m: vec![-3] }] };
        let m = apply_relation(&arr, &tt, &Rewrite::R5 { pos: 0 }).unwrap();
        assert_eq!(m.arrows, vec![Arrow::Translate { m: vec![-2] }]);
        assert_eq!(apply_relation(&arr, &m, &Rewrite::R5Inv { pos: 0, m: vec![1] }).unwrap(), tt);
    }

    #[test]
    fn rank1_reduction() {
        let (_, arr) = setup();
        let p = parse_path(&arr, &h(1), "x(1,+);x(1,-)").unwrap();
        assert!(reduce_rank1(&arr, &p).unwrap().arrows.is_empty());
        let p = parse_path(&arr, &h(1), "x(1,+);t(1);t(-1)").unwrap();
        let r = reduce_rank1(&arr, &p).unwrap();
        assert_eq!(format_word(&rank1_word(&arr, &r).unwrap()), "x(1,+,+)");
        assert_eq!(reduce_rank1(&arr, &r).unwrap(), r);
        // a loop around a wall does not cancel
        let p = parse_path(&arr, &h(1), "x(1,+,+);x(1,-,-)").unwrap();
        assert_eq!(rank1_word(&arr, &p).unwrap().edges.len(), 2);
        let p = parse_path(&arr, &h(1), "x(1,+);t(1);x(2,-)").unwrap();
        assert_eq!(p.end(&arr).unwrap(), h(3));
        assert_eq!(format_word(&rank1_word(&arr, &p).unwrap()), "t(1)");
        assert_eq!(format_word(&rank1_word(&arr, &reduce_rank1(&arr, &p).unwrap()).unwrap()), "t(1)");
        assert!(parse_path(&arr, &h(1), "x(2,+)").is_err());
        assert!(parse_path(&arr, &h(1), "y(1)").is_err());
        let rep2 = QSRep::from_torus(vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        let arr2 = Arrangement::build(&rep2).unwrap();
        assert!(matches!(rank1_word(&arr2, &Path::new(vec![Rat::new(1, 2), Rat::new(1, 2)])), Err(Error::Path(_))));
    }

    #[test]
    fn random_paths_and_idempotence() {
        let (_, arr) = setup();
        let mut rng = StdRng::seed_from_u64(7);
        let (lo, hi) = arr.default_box(4);
        for _ in 0..200 {
            let len = rng.random_range(1..=4);
            let p = random_positive_path(&arr, &mut rng, &lo, &hi, len);
            assert!(is_positive(&arr, &p).unwrap());
            assert!(minimality_report(&arr, &p).unwrap().agree());
            let r = reduce_rank1(&arr, &p).unwrap();
            assert_eq!(reduce_rank1(&arr, &r).unwrap(), r);
            let a = p.start.clone();
            let b = p.end(&arr).unwrap();
            if !arr.same_chamber(&a, &b).unwrap() {
                let m1 = random_minimal_path(&arr, &mut rng, &a, &b, 3);
                let m2 = random_minimal_path(&arr, &mut rng, &a, &b, 2);
                assert!(is_minimal(&arr, &m1).unwrap() && is_minimal(&arr, &m2).unwrap());
                assert_eq!(rank1_word(&arr, &m1).unwrap(), rank1_word(&arr, &m2).unwrap());
            }
        }
    }

    #[test]
    fn transcripts() {
        let (rep, arr) = setup();
        let p = Path { start: h(1), arrows: vec![cross(1, 3, 1), cross(3, 1, -1)] };
        let t = mutation_transcript(&rep, &arr, &p).unwrap();
        assert!(t.coherent(), "{:?}", t.failures);
        assert_eq!(t.label(), "Φ^1·Φ^1");
        assert_eq!(t.total_steps(), 2);
        let p = parse_path(&arr, &h(1), "t(2)").unwrap();
        let t = mutation_transcript(&rep, &arr, &p).unwrap();
        assert!(t.coherent());
        assert_eq!(t.entries, vec![TranscriptEntry::Shift { m: vec![2] }]);
        assert_eq!(t.image[&vec![0]], vec![2]);
        // a non-positive crossing contributes an inverse word
        let p = parse_path(&arr, &h(1), "x(1,+,-)").unwrap();
        let t = mutation_transcript(&rep, &arr, &p).unwrap();
        assert!(t.coherent(), "{:?}", t.failures);
        assert_eq!(t.label(), "Φ^-1");
        // a long arrow splits into elementary crossings
        let rep3 = torus1(&[1, 1, 1, -1, -1, -1]).unwrap();
        let arr3 = Arrangement::build(&rep3).unwrap();
        let p = Path { start: vec![q(0)], arrows: vec![Arrow::Cross { from: vec![q(0)], to: vec![q(3)], label: vec![q(1)] }] };
        let t = mutation_transcript(&rep3, &arr3, &p).unwrap();
        assert!(t.coherent(), "{:?}", t.failures);
        assert_eq!(t.entries.len(), 3);
        assert_eq!(t.total_steps(), 6);
    }

    #[test]
    fn gl2_transcript_counts() {
        let rep = crate::catalog::gl2_sym3();
        let arr = Arrangement::build(&rep).unwrap();
        let p = Path::through(&[vec![q(0), q(0)], vec![q(1), q(1)]]);
        let t = mutation_transcript(&rep, &arr, &p).unwrap();
        assert!(t.coherent(), "{:?}", t.failures);
        assert_eq!(t.total_steps(), 4);
    }
}
