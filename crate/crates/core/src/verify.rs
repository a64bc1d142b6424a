//! Invariant suites over bundled and random representations.

use rand::{Rng, RngExt};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arrangement::{on_wall_oracle, Arrangement};
use crate::bwb::complex_terms;
use crate::cy::CYModel;
use crate::error::Error;
use crate::groupoid::{is_positive, minimality_report, random_minimal_path, random_positive_path, rank1_word, reduce_rank1};
use crate::linalg::{fmt_qvec, rank_i, QVec, Weight};
use crate::mutation::check_periodicity;
use crate::rep::QSRep;
use crate::windows::{check_crossing, wall_crossing};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: String,
    pub subject: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        json!({
            "passed": self.passed(),
            "total": self.checks.len(),
            "failed": failed,
            "checks": self.checks,
            "warnings": self.warnings,
        })
    }
}

/// Options shared by the suites.
#[derive(Debug, Clone)]
pub struct Options {
    pub periods: i64,
    pub paths_per_arrangement: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { periods: 2, paths_per_arrangement: 200, seed: 0 }
    }
}

fn check(suite: &str, subject: &str, name: &str, result: Result<Vec<String>, Error>) -> Check {
    let (passed, detail) = match result {
        Ok(f) if f.is_empty() => (true, String::new()),
        Ok(f) => (false, f.join("; ")),
        Err(e) => (false, e.to_string()),
    };
    Check { suite: suite.into(), subject: subject.into(), name: name.into(), passed, detail }
}

/// Adjacent pairs in the symmetric box of `periods` fundamental domains.
pub fn pairs(arr: &Arrangement, periods: i64) -> Vec<(QVec, QVec)> {
    let (lo, hi) = arr.default_box(periods);
    arr.adjacent_pairs_in_box(&lo, &hi)
}

/// Every suite for one representation.
pub fn rep_suite(subject: &str, rep: &QSRep, opts: &Options) -> Vec<Check> {
    let mut out = vec![check("nabla", subject, "dominant slice and W-union", rep.cross_check_nabla().map(|_| vec![]))];
    let arr = match Arrangement::build(rep) {
        Ok(a) => a,
        Err(e) => {
            out.push(check("arrangement", subject, "build", Err(e)));
            return out;
        }
    };
    let ps = pairs(&arr, opts.periods);
    out.push(check("arrangement", subject, "wall test agrees with the boundary oracle", {
        let mut f = vec![];
        for (a, b) in &ps {
            for p in [a, b] {
                if on_wall_oracle(rep, p) {
                    f.push(format!("{} lies in a chamber but the oracle puts it on a wall", fmt_qvec(p)));
                }
            }
            if let Ok(d0) = arr.crossing_point(a, b) {
                if !on_wall_oracle(rep, &d0) {
                    f.push(format!("crossing point {} is not on a wall by the oracle", fmt_qvec(&d0)));
                }
            }
        }
        Ok(f)
    }));
    let crossings: Vec<Check> = ps
        .par_iter()
        .map(|(a, b)| {
            let at = format!("{subject} {}→{}", fmt_qvec(a), fmt_qvec(b));
            check("crossing", &at, "μ involution, partition, duals, toric lemmas", check_crossing(rep, &arr, a, b).map(|r| r.failures))
        })
        .collect();
    out.extend(crossings);
    let bwb: Vec<Check> = ps
        .par_iter()
        .map(|(a, b)| {
            let at = format!("{subject} {}→{}", fmt_qvec(a), fmt_qvec(b));
            check("bwb", &at, "complex endpoints and support", bwb_failures(rep, &arr, a, b))
        })
        .collect();
    out.extend(bwb);
    if rep.root_datum.is_torus() {
        let muts: Vec<Check> = ps
            .par_iter()
            .map(|(a, b)| {
                let at = format!("{subject} {}→{}", fmt_qvec(a), fmt_qvec(b));
                let r = check_periodicity(rep, &arr, a, b).map(|r| {
                    let mut f = r.failures.clone();
                    if !r.ok() && f.is_empty() {
                        f.push(format!(
                            "period {} (d⁺={}, d*⁺={}): target at {:?}, return at {:?}, right inverse {}",
                            r.period, r.d_plus, r.d_plus_dual, r.reaches_target, r.returns, r.right_inverse_ok
                        ));
                    }
                    f
                });
                check("mutation", &at, "periodicity, endpoints and telescoping", r)
            })
            .collect();
        out.extend(muts);
    }
    out.push(check("groupoid", subject, "minimality criteria and rank-one normal forms", groupoid_failures(&arr, opts)));
    out
}

pub fn bwb_failures(rep: &QSRep, arr: &Arrangement, a: &[crate::linalg::Rat], b: &[crate::linalg::Rat]) -> Result<Vec<String>, Error> {
    let c = wall_crossing(rep, arr, a, b)?;
    let mut f = vec![];
    for fc in &c.faces {
        for chi in &fc.chars {
            let t = complex_terms(rep, &fc.face, chi)?;
            f.extend(t.violations(rep, &fc.face).into_iter().map(|v| format!("{chi:?}: {v}")));
        }
    }
    Ok(f)
}

/// Random positive paths: the minimality criteria agree, and in rank one the normal form is
/// idempotent and equal for minimal paths with common endpoints.
pub fn groupoid_failures(arr: &Arrangement, opts: &Options) -> Result<Vec<String>, Error> {
    use rand::SeedableRng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(opts.seed);
    let (lo, hi) = arr.default_box(opts.periods);
    let mut f = vec![];
    for _ in 0..opts.paths_per_arrangement {
        let len = rng.random_range(1..=4);
        let p = random_positive_path(arr, &mut rng, &lo, &hi, len);
        if !is_positive(arr, &p)? {
            f.push("generated path is not positive".into());
        }
        let r = minimality_report(arr, &p)?;
        if !r.agree() {
            f.push(format!("criteria disagree: {r:?}"));
        }
        if arr.dim() == 1 {
            let once = reduce_rank1(arr, &p)?;
            if reduce_rank1(arr, &once)? != once {
                f.push("rank-one reduction is not idempotent".into());
            }
            let (a, b) = (p.start.clone(), p.end(arr)?);
            if !arr.same_chamber(&a, &b)? {
                let m1 = random_minimal_path(arr, &mut rng, &a, &b, 3);
                let m2 = random_minimal_path(arr, &mut rng, &a, &b, 1);
                if rank1_word(arr, &m1)? != rank1_word(arr, &m2)? {
                    f.push("minimal positive paths with equal endpoints reduce differently".into());
                }
            }
        }
    }
    Ok(f)
}

pub fn cy_suite(a: &[i64], d: &[i64], m: i64) -> Vec<Check> {
    let subject = format!("CY({a:?};{d:?})");
    let r = CYModel::build(a, d).and_then(|model| model.report(m)).map(|rep| {
        if rep.ok() {
            vec![]
        } else {
            vec![format!("report {}", rep.to_json())]
        }
    });
    vec![check("cy", &subject, "window size, crossing data, twist word", r)]
}

/// The bundled suite: the three examples and the two CY models.
pub fn bundled(opts: &Options) -> Report {
    let mut report = Report::default();
    for (name, rep) in crate::catalog::examples() {
        report.checks.extend(rep_suite(name, &rep, opts));
    }
    report.checks.extend(cy_suite(&[1, 1, 1, 1, 1], &[5], 0));
    report.checks.extend(cy_suite(&[1, 1, 1, 1, 1, 1], &[3, 3], -1));
    report
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Weight {
    loop {
        let v: Weight = (0..rank).map(|_| rng.random_range(-1..=1i64)).collect();
        if v.iter().any(|x| *x != 0) {
            let (v, _) = crate::linalg::sign_normalize(&v);
            return v;
        }
    }
}

/// A random quasi-symmetric torus representation of rank at most 3 with at most `max_d` weights.
/// Each line carries multiples of a primitive direction with balanced sums and at least two
/// weights on each side, so every wall face has `d⁺ ≥ 2`.
pub fn random_torus_rep<R: Rng + ?Sized>(rng: &mut R, max_d: usize) -> QSRep {
    const RANK1: [(&[i64], &[i64]); 5] = [(&[1, 1], &[1, 1]), (&[1, 1, 1], &[1, 2]), (&[2, 2], &[1, 1, 2]), (&[1, 1, 1], &[1, 1, 1]), (&[1, 2], &[1, 2])];
    const LINE: [(&[i64], &[i64]); 4] = [(&[1, 1], &[1, 1]), (&[1, 1], &[1, 1]), (&[1, 2], &[1, 2]), (&[1, 1, 1], &[1, 2])];
    loop {
        let rank = rng.random_range(1..=3usize);
        let mut weights: Vec<Weight> = vec![];
        if rank == 1 {
            let (p, n) = RANK1[rng.random_range(0..RANK1.len())];
            weights.extend(p.iter().map(|&x| vec![x]));
            weights.extend(n.iter().map(|&x| vec![-x]));
        } else {
            let mut dirs: Vec<Weight> = vec![];
            while dirs.len() < rank + rng.random_range(0..=1usize) {
                let v = random_direction(rng, rank);
                if !dirs.contains(&v) {
                    dirs.push(v);
                }
            }
            for v in &dirs {
                let (p, n) = LINE[rng.random_range(0..LINE.len())];
                weights.extend(p.iter().map(|&k| v.iter().map(|x| x * k).collect::<Weight>()));
                weights.extend(n.iter().map(|&k| v.iter().map(|x| -x * k).collect::<Weight>()));
            }
        }
        if weights.len() > max_d || rank_i(&weights) != rank {
            continue;
        }
        if let Ok(rep) = QSRep::from_torus(weights) {
            return rep;
        }
    }
}

/// `count` random torus representations from a seed.
pub fn random_corpus(seed: u64, count: usize, max_d: usize) -> Vec<QSRep> {
    use rand::SeedableRng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_torus_rep(&mut rng, max_d)).collect()
}

/// Suites over a random corpus.
pub fn random(seed: u64, count: usize, opts: &Options) -> Report {
    let corpus = random_corpus(seed, count, 12);
    let checks: Vec<Vec<Check>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, rep)| {
            let name = format!("random#{i} {:?}", rep.weights);
            rep_suite(&name, rep, opts)
        })
        .collect();
    Report { checks: checks.into_iter().flatten().collect(), warnings: vec![] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_suite_passes() {
        let r = bundled(&Options { paths_per_arrangement: 30, ..Options::default() });
        let bad: Vec<&Check> = r.checks.iter().filter(|c| !c.passed).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = random_corpus(3, 20, 12);
        let b = random_corpus(3, 20, 12);
        assert_eq!(a.iter().map(|r| r.weights.clone()).collect::<Vec<_>>(), b.iter().map(|r| r.weights.clone()).collect::<Vec<_>>());
        for r in &a {
            assert!(r.d() <= 12 && r.rank() <= 3 && r.quasi_symmetric);
        }
    }
}
