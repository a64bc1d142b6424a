//! Bundled example representations.

use crate::linalg::Weight;
use crate::rep::QSRep;
use crate::root_data::RootDatum;
use crate::Result;

/// A torus representation of rank 1 from a list of integer weights.
pub fn torus1(ws: &[i64]) -> Result<QSRep> {
    QSRep::from_torus(ws.iter().map(|&w| vec![w]).collect())
}

/// The weights of `Sym³(k²) ⊕ Sym³(k²)*` for `GL₂`.
pub fn gl2_sym3_weights() -> Vec<Weight> {
    let mut w: Vec<Weight> = (0..=3).map(|i| vec![3 - i, i]).collect();
    w.extend((0..=3).map(|i| vec![i - 3, -i]));
    w
}

pub fn gl2_sym3() -> QSRep {
    QSRep::new(RootDatum::gl(2).expect("GL2 root datum"), gl2_sym3_weights(), false).expect("GL2 example is quasi-symmetric")
}

/// The named non-CY examples of the verification suite.
pub fn examples() -> Vec<(&'static str, QSRep)> {
    vec![
        ("torus(1,1,-1,-1)", torus1(&[1, 1, -1, -1]).expect("valid")),
        ("torus(1,1,1,-1,-1,-1)", torus1(&[1, 1, 1, -1, -1, -1]).expect("valid")),
        ("GL2 Sym3+Sym3*", gl2_sym3()),
    ]
}
