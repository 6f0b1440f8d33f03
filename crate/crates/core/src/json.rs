//! JSON wire formats for tensors, tensor polynomials and `h^r`-vectors.
//!
//! Rationals are `"p/q"` strings (`"p"` for integers). A rank-2 tensor is a
//! nested array in symmetric-matrix form; any other rank is an object
//! `{"rank": r, "dim": d, "entries": {"1,2": "...", ...}}` keyed by the
//! sorted 1-based multi-index.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::tensor::{multi_indices, HrVector, SymTensor, TensorPolynomial};

fn bad(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

pub fn tensor_to_json(t: &SymTensor) -> Value {
    if t.rank() == 2 {
        let m = t.to_matrix().expect("rank 2");
        return Value::Array(
            m.iter()
                .map(|row| Value::Array(row.iter().map(|q| Value::String(q.to_string())).collect()))
                .collect(),
        );
    }
    let entries: Map<String, Value> = multi_indices(t.dim(), t.rank())
        .iter()
        .zip(t.entries())
        .map(|(ix, q)| {
            let key = ix.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
            (key, Value::String(q.to_string()))
        })
        .collect();
    json!({ "rank": t.rank(), "dim": t.dim(), "entries": entries })
}

pub fn tensor_from_json(v: &Value) -> Result<SymTensor> {
    match v {
        Value::Array(rows) => {
            let m = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| bad("matrix rows must be arrays"))?
                        .iter()
                        .map(|x| parse_rational(x.as_str().ok_or_else(|| bad("matrix entries must be strings"))?))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if m.iter().any(|r| r.len() != m.len()) {
                return Err(bad("matrix must be square"));
            }
            SymTensor::from_matrix(&m)
        }
        Value::Object(obj) => {
            let rank = obj.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing rank"))? as usize;
            let dim = obj.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing dim"))? as usize;
            let raw = obj.get("entries").and_then(Value::as_object).ok_or_else(|| bad("missing entries"))?;
            let mut by_key = BTreeMap::new();
            for (k, x) in raw {
                by_key.insert(k.clone(), parse_rational(x.as_str().ok_or_else(|| bad("entries must be strings"))?)?);
            }
            let indices = multi_indices(dim, rank);
            if by_key.len() != indices.len() {
                return Err(bad("wrong number of tensor entries"));
            }
            let entries = indices
                .iter()
                .map(|ix| {
                    let key = ix.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
                    by_key.remove(&key).ok_or_else(|| bad(&format!("missing entry {key:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            SymTensor::from_entries(rank, dim, entries)
        }
        _ => Err(bad("tensor must be a matrix or an entry map")),
    }
}

fn tensors_from(v: &Value, field: &str) -> Result<Vec<SymTensor>> {
    v.get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(&format!("missing {field}")))?
        .iter()
        .map(tensor_from_json)
        .collect()
}

/// `{"r": r, "coeffs": [c_0, c_1, ...]}` with `c_k` the coefficient of `n^k`.
pub fn polynomial_to_json(p: &TensorPolynomial) -> Value {
    json!({ "r": p.rank(), "coeffs": p.coeffs.iter().map(tensor_to_json).collect::<Vec<_>>() })
}

pub fn polynomial_from_json(v: &Value) -> Result<TensorPolynomial> {
    let coeffs = tensors_from(v, "coeffs")?;
    if coeffs.is_empty() {
        return Err(bad("polynomial needs coefficients"));
    }
    Ok(TensorPolynomial { coeffs })
}

/// `{"h": [h_0, h_1, ...]}`.
pub fn hvector_to_json(h: &HrVector) -> Value {
    json!({ "h": h.entries.iter().map(tensor_to_json).collect::<Vec<_>>() })
}

pub fn hvector_from_json(v: &Value) -> Result<HrVector> {
    Ok(HrVector { entries: tensors_from(v, "h")? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn matrix_format() {
        let t = SymTensor::from_matrix(&[vec![rat(1, 2), rat(3, 4)], vec![rat(3, 4), rat(49, 6)]]).unwrap();
        let v = tensor_to_json(&t);
        assert_eq!(v, json!([["1/2", "3/4"], ["3/4", "49/6"]]));
        assert_eq!(tensor_from_json(&v).unwrap(), t);
    }

    #[test]
    fn map_format() {
        let t = SymTensor::from_vector(&[int(2), rat(-1, 3), int(0)]);
        let v = tensor_to_json(&t);
        assert_eq!(v, json!({"rank": 1, "dim": 3, "entries": {"1": "2", "2": "-1/3", "3": "0"}}));
        assert_eq!(tensor_from_json(&v).unwrap(), t);
        let s = SymTensor::scalar(int(5), 2);
        assert_eq!(tensor_from_json(&tensor_to_json(&s)).unwrap(), s);
        let mut e = vec![int(0); 4];
        e[1] = rat(7, 2);
        let r3 = SymTensor::from_entries(3, 2, e).unwrap();
        assert_eq!(tensor_from_json(&tensor_to_json(&r3)).unwrap(), r3);
    }

    #[test]
    fn rejects_malformed() {
        assert!(tensor_from_json(&json!([["1", "2"], ["3", "1"]])).is_err());
        assert!(tensor_from_json(&json!([["1", "x"], ["x", "1"]])).is_err());
        assert!(tensor_from_json(&json!({"rank": 1, "dim": 2, "entries": {"1": "1"}})).is_err());
        assert!(tensor_from_json(&json!(3)).is_err());
    }

    #[test]
    fn containers_round_trip() {
        let a = SymTensor::from_vector(&[int(1), int(2)]);
        let p = TensorPolynomial { coeffs: vec![a.clone(), a.scale(&rat(1, 2))] };
        assert_eq!(polynomial_from_json(&polynomial_to_json(&p)).unwrap(), p);
        let h = HrVector { entries: vec![a.clone(), a] };
        assert_eq!(hvector_from_json(&hvector_to_json(&h)).unwrap(), h);
    }
}
