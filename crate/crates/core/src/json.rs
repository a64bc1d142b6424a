//! JSON encodings: rationals as "p/q" strings, weights as integer arrays.

use serde_json::{json, Value};

use crate::linalg::{Rat, Weight};

pub fn rat(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn qvec(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn weights<'a>(ws: impl IntoIterator<Item = &'a Weight>) -> Value {
    let mut v: Vec<&Weight> = ws.into_iter().collect();
    v.sort();
    json!(v)
}
