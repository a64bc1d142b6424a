//! Exact integer and rational linear algebra on small dense matrices.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rat = Ratio<i128>;
pub type QVec = Vec<Rat>;
pub type Weight = Vec<i64>;
/// Row-major integer matrix acting on column vectors.
pub type IMat = Vec<Vec<i64>>;

pub fn q(n: i64) -> Rat {
    Rat::from_integer(n as i128)
}

pub fn qv(w: &[i64]) -> QVec {
    w.iter().map(|&x| q(x)).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn qdot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Pairing of a rational point with an integral covector.
pub fn qdot_i(a: &[Rat], b: &[i64]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, &y)| acc + x * Rat::from_integer(y as i128))
}

pub fn qadd(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn qsub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qscale(a: &[Rat], s: Rat) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn wadd(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn wsub(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn wneg(a: &[i64]) -> Weight {
    a.iter().map(|x| -x).collect()
}

/// Returns the integer vector if every coordinate is integral.
pub fn to_weight(v: &[Rat]) -> Option<Weight> {
    v.iter()
        .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
        .collect()
}

pub fn is_zero(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn fmt_qvec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(","))
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    t.parse::<Rat>().map_err(|e| format!("bad rational '{t}': {e}"))
}

/// Parses a comma separated list of rationals, e.g. `1/2,-1/4`.
pub fn parse_qvec(s: &str) -> Result<QVec, String> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(parse_rat).collect()
}

pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let v = parse_qvec(s)?;
    to_weight(&v).ok_or_else(|| format!("'{s}' is not an integral weight"))
}

pub fn mat_vec(m: &IMat, v: &[i64]) -> Weight {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_qvec(m: &IMat, v: &[Rat]) -> QVec {
    m.iter().map(|row| qdot_i(v, row)).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(m: &IMat) -> IMat {
    let n = m.first().map_or(0, |r| r.len());
    (0..n).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[QVec]) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..ncols {
                    let d = m[r][j] * f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec]) -> usize {
    rref(rows).1.len()
}

pub fn rank_i(rows: &[Weight]) -> usize {
    let q: Vec<QVec> = rows.iter().map(|r| qv(r)).collect();
    rank(&q)
}

/// Basis of the rational null space `{x : rows * x = 0}`.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (m, pivots) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::from_integer(1);
            for (row, &p) in m.iter().zip(&pivots) {
                x[p] = -row[f];
            }
            x
        })
        .collect()
}

/// Scales a nonzero rational vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[Rat]) -> Weight {
    let l = v.iter().fold(1i128, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i128> = v.iter().map(|x| (x * Rat::from_integer(l)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x));
    let g = if g == 0 { 1 } else { g };
    ints.iter().map(|x| (x / g) as i64).collect()
}

pub fn primitive_i(v: &[i64]) -> Weight {
    let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Flips sign so the first nonzero coordinate is positive.
pub fn sign_normalize(v: &[i64]) -> (Weight, i64) {
    match v.iter().find(|x| **x != 0) {
        Some(x) if *x < 0 => (wneg(v), -1),
        _ => (v.to_vec(), 1),
    }
}

/// Solves a square system; `None` if singular.
pub fn solve(a: &[QVec], b: &[Rat]) -> Option<QVec> {
    let n = a.len();
    let aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.iter().map(|r| r[n]).collect())
}

/// Primitive normal of the hyperplane spanned by `n-1` vectors in dimension `n`,
/// or `None` if they are dependent.
pub fn normal_of(vectors: &[QVec], n: usize) -> Option<Weight> {
    let ns = nullspace(vectors, n);
    if ns.len() == 1 {
        Some(primitive(&ns[0]))
    } else {
        None
    }
}

/// Integer row echelon form by Euclidean row operations on the first `limit` columns.
fn echelon_i(rows: &mut Vec<Vec<i128>>, limit: usize) -> usize {
    let mut r = 0;
    for c in 0..limit {
        loop {
            let nz: Vec<usize> = (r..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            rows.swap(r, p);
            let mut done = true;
            for i in (r + 1)..rows.len() {
                if rows[i][c] != 0 {
                    let f = Integer::div_floor(&rows[i][c], &rows[r][c]);
                    for j in 0..rows[i].len() {
                        let d = f * rows[r][j];
                        rows[i][j] -= d;
                    }
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                r += 1;
                break;
            }
        }
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Lattice basis of `{x in Z^n : rows * x = 0}`.
pub fn int_kernel(rows: &[Weight], n: usize) -> Vec<Weight> {
    let m = rows.len();
    let mut aug: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            let mut v: Vec<i128> = rows.iter().map(|r| r[j] as i128).collect();
            v.extend((0..n).map(|k| i128::from(k == j)));
            v
        })
        .collect();
    let r = echelon_i(&mut aug, m);
    aug[r..]
        .iter()
        .map(|v| v[m..].iter().map(|&x| x as i64).collect())
        .collect()
}

/// Index of the sublattice generated by `gens` in `Z^n`, or `None` if not of full rank.
pub fn lattice_index(gens: &[Weight], n: usize) -> Option<u128> {
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let r = echelon_i(&mut rows, n);
    if r < n {
        return None;
    }
    let mut det: i128 = 1;
    let mut row = 0;
    for c in 0..n {
        if row < r && rows[row][c] != 0 {
            det *= rows[row][c];
            row += 1;
        } else {
            return None;
        }
    }
    Some(det.unsigned_abs())
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(m: &IMat) -> Option<IMat> {
    let n = m.len();
    let cols: Vec<QVec> = (0..n)
        .map(|j| {
            let rows: Vec<QVec> = m.iter().map(|r| qv(r)).collect();
            let e: QVec = (0..n).map(|k| q(i64::from(k == j))).collect();
            solve(&rows, &e)
        })
        .collect::<Option<_>>()?;
    let inv: Vec<Weight> = cols.iter().map(|c| to_weight(c)).collect::<Option<_>>()?;
    Some(transpose(&inv))
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn sign(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub fn floor(r: &Rat) -> i128 {
    r.floor().to_integer()
}

pub fn ceil(r: &Rat) -> i128 {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_gl2_invariants() {
        // w - I for the swap matrix
        let k = int_kernel(&[vec![-1, 1], vec![1, -1]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(sign_normalize(&k[0]).0, vec![1, 1]);
    }

    #[test]
    fn kernel_is_saturated() {
        let k = int_kernel(&[vec![2, 4, 6]], 3);
        assert_eq!(k.len(), 2);
        // the lattice {x : x1 + 2x2 + 3x3 = 0} has index 1 in its span; its Gram determinant is 14
        let g = |a: &Weight, b: &Weight| dot(a, b) as i128;
        let det = g(&k[0], &k[0]) * g(&k[1], &k[1]) - g(&k[0], &k[1]).pow(2);
        assert_eq!(det, 14);
    }

    #[test]
    fn index_of_sublattices() {
        assert_eq!(lattice_index(&[vec![1], vec![-1]], 1), Some(1));
        assert_eq!(lattice_index(&[vec![2], vec![-4]], 1), Some(2));
        assert_eq!(lattice_index(&[vec![2, 1], vec![1, 2]], 2), Some(3));
        assert_eq!(lattice_index(&[vec![1, 1], vec![2, 2]], 2), None);
    }

    #[test]
    fn normals_and_parsing() {
        let n = normal_of(&[qv(&[2, 1])], 2).unwrap();
        assert_eq!(sign_normalize(&n).0, vec![1, -2]);
        let n = normal_of(&[qv(&[1, 0, 0]), qv(&[0, 1, 0])], 3).unwrap();
        assert_eq!(sign_normalize(&n).0, vec![0, 0, 1]);
        assert_eq!(parse_qvec("1/2,-1/4").unwrap(), vec![Rat::new(1, 2), Rat::new(-1, 4)]);
        assert!(parse_rat("1/0").is_err());
        assert_eq!(fmt_rat(&Rat::new(-3, 2)), "-3/2");
    }

    #[test]
    fn unimodular_inverse() {
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(inverse_unimodular(&m).unwrap(), m);
        let m = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(inverse_unimodular(&m).unwrap(), vec![vec![1, -1], vec![0, 1]]);
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(binomial(5, 2), 10);
    }
}
