//! Character-level terms of the complexes `A•_{F,χ}` via the Borel–Weil–Bott rule.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::linalg::{subsets, wadd, Weight};
use crate::rep::QSRep;
use crate::root_data::Dominance;
use crate::windows::{wall_crossing, FaceData};

/// Multiset of weights with multiplicities.
pub type Multiset = BTreeMap<Weight, usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexTerms {
    pub chi: Weight,
    pub beta_plus: Weight,
    pub d_plus: usize,
    pub top: usize,
    pub terms: BTreeMap<usize, Multiset>,
    pub singular_dropped: usize,
    /// True exactly when W is trivial, where the terms are the Koszul terms.
    pub exact: bool,
}

fn subset_sum(rep: &QSRep, idx: &[usize], sub: &[usize]) -> Weight {
    sub.iter().fold(vec![0; rep.rank()], |acc, &k| wadd(&acc, &rep.weights[idx[k]]))
}

/// Distinct sums of `m` weights of `𝒲_F⁺` over index subsets.
pub fn wedge_sums(rep: &QSRep, f: &FaceData, m: usize) -> Result<BTreeSet<Weight>> {
    if m > f.d_plus {
        return Err(Error::InvalidInput(format!("m = {m} exceeds d_plus = {}", f.d_plus)));
    }
    Ok(subsets(f.plus.len(), m).iter().map(|s| subset_sum(rep, &f.plus, s)).collect())
}

/// `⋀*𝒲_F⁺`: sums over `1 <= m <= d_F⁺ − 1`.
pub fn wedge_star(rep: &QSRep, f: &FaceData) -> BTreeSet<Weight> {
    (1..f.d_plus).flat_map(|m| wedge_sums(rep, f, m).unwrap()).collect()
}

pub fn complex_terms(rep: &QSRep, f: &FaceData, chi: &[i64]) -> Result<ComplexTerms> {
    let rd = &rep.root_datum;
    if !rd.is_dominant(chi) {
        return Err(Error::InvalidInput(format!("{chi:?} is not dominant")));
    }
    let mut terms: BTreeMap<usize, Multiset> = BTreeMap::new();
    let mut singular_dropped = 0;
    for m in 0..=f.d_plus {
        for s in subsets(f.plus.len(), m) {
            let v = wadd(chi, &subset_sum(rep, &f.plus, &s));
            match rd.dominant_representative(&v) {
                Dominance::Singular => singular_dropped += 1,
                Dominance::Regular { chi_plus, length, .. } => {
                    *terms.entry(m + length).or_default().entry(chi_plus).or_default() += 1;
                }
            }
        }
    }
    Ok(ComplexTerms {
        chi: chi.to_vec(),
        beta_plus: f.beta_plus.clone(),
        d_plus: f.d_plus,
        top: f.d_plus + rd.weyl[rd.w0].length,
        terms,
        singular_dropped,
        exact: rd.is_torus(),
    })
}

impl ComplexTerms {
    /// Support, endpoint and shape checks; returns the list of violations.
    pub fn violations(&self, rep: &QSRep, f: &FaceData) -> Vec<String> {
        let rd = &rep.root_datum;
        let mut out = Vec::new();
        if self.terms.keys().any(|&k| k > self.top) {
            out.push("terms outside [0, d⁺+ℓ(w₀)]".into());
        }
        let single = |m: &Multiset, w: &Weight| m.len() == 1 && m.get(w) == Some(&1);
        match self.terms.get(&0) {
            Some(m) if single(m, &self.chi) => {}
            _ => out.push("degree 0 is not {χ}".into()),
        }
        match rd.dominant_representative(&wadd(&self.chi, &self.beta_plus)) {
            Dominance::Regular { chi_plus, .. } => match self.terms.get(&self.top) {
                Some(m) if single(m, &chi_plus) => {}
                _ => out.push("top degree is not {(χ+β_F⁺)⁺}".into()),
            },
            Dominance::Singular => out.push("χ+β_F⁺ is singular".into()),
        }
        let allowed: BTreeSet<Weight> = wedge_star(rep, f)
            .iter()
            .filter_map(|b| match rd.dominant_representative(&wadd(&self.chi, b)) {
                Dominance::Regular { chi_plus, .. } => Some(chi_plus),
                Dominance::Singular => None,
            })
            .collect();
        for (&k, m) in &self.terms {
            if k == 0 || k == self.top {
                continue;
            }
            for w in m.keys() {
                if !allowed.contains(w) {
                    out.push(format!("degree {k} term {w:?} is not (χ+β)⁺ for β in ⋀*𝒲_F⁺"));
                }
            }
        }
        if self.exact {
            for m in 0..=self.d_plus {
                let mut koszul = Multiset::new();
                for s in subsets(f.plus.len(), m) {
                    *koszul.entry(wadd(&self.chi, &subset_sum(rep, &f.plus, &s))).or_default() += 1;
                }
                if self.terms.get(&m).cloned().unwrap_or_default() != koszul {
                    out.push(format!("degree {m} differs from the Koszul term"));
                }
            }
        }
        // Euler characteristic against Bott straightening by simple reflections
        let mut lhs: BTreeMap<Weight, i64> = BTreeMap::new();
        for (&k, m) in &self.terms {
            for (w, &c) in m {
                *lhs.entry(w.clone()).or_default() += if k % 2 == 0 { c as i64 } else { -(c as i64) };
            }
        }
        let mut rhs: BTreeMap<Weight, i64> = BTreeMap::new();
        for m in 0..=self.d_plus {
            for s in subsets(f.plus.len(), m) {
                let v = wadd(&self.chi, &subset_sum(rep, &f.plus, &s));
                if let Some((w, l)) = rd.straighten(&v) {
                    *rhs.entry(w).or_default() += if (m + l) % 2 == 0 { 1 } else { -1 };
                }
            }
        }
        lhs.retain(|_, v| *v != 0);
        rhs.retain(|_, v| *v != 0);
        if lhs != rhs {
            out.push("alternating sum differs from straightened Koszul character".into());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let degrees: serde_json::Map<String, Value> = self
            .terms
            .iter()
            .map(|(k, m)| {
                let list: Vec<Value> = m.iter().map(|(w, c)| json!({"weight": w, "multiplicity": c})).collect();
                (k.to_string(), Value::Array(list))
            })
            .collect();
        json!({
            "chi": self.chi,
            "degrees": degrees,
            "exact": self.exact,
            "singular_dropped": self.singular_dropped,
        })
    }
}

/// `(L_δ^F, N_δ^F)` for a face of `ℱ_(δ,δ′)` given by its facet set.
pub fn summand_sets(
    rep: &QSRep,
    arr: &Arrangement,
    delta: &[crate::linalg::Rat],
    delta_prime: &[crate::linalg::Rat],
    facets: &[usize],
) -> Result<(BTreeSet<Weight>, BTreeSet<Weight>)> {
    let c = wall_crossing(rep, arr, delta, delta_prime)?;
    let class = c
        .faces
        .iter()
        .find(|cl| cl.face.id() == facets)
        .ok_or_else(|| Error::InvalidInput("face is not in ℱ_(δ,δ′)".into()))?;
    let rd = &rep.root_datum;
    let mut l = BTreeSet::new();
    for chi in &class.chars {
        for b in wedge_star(rep, &class.face) {
            if let Dominance::Regular { chi_plus, .. } = rd.dominant_representative(&wadd(chi, &b)) {
                l.insert(chi_plus);
            }
        }
    }
    let own: BTreeSet<&Weight> = class.chars.iter().collect();
    let n = c.from.chars.iter().filter(|x| !own.contains(x)).cloned().collect();
    Ok((l, n))
}
