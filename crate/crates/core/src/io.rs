//! JSON for factorizations and reports.
//!
//! Factorization schema: `{"k": 2, "A": [[a11, a12, a22], …], "B": […],
//! "M": [[…], …]}` with `M` optional. Each factor is its upper triangle in
//! row order. Entries are JSON numbers or `"num/den"` strings; numbers are
//! read from their literal text, so exact mode loses nothing.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Number, Value};

use crate::classify::{BoundaryReport, RigidityReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::factorization::{PsdFactorization, ValidationReport};
use crate::motions::MotionMatrix;
use crate::oracle::OracleVerdict;
use crate::scalar::{parse_rational, Scalar};
use crate::symcore::{sym_dim, SymMat};

/// Scalars with a JSON representation.
pub trait JsonScalar: Scalar {
    fn from_text(text: &str) -> Option<Self>;
    fn to_json(&self) -> Value;
}

impl JsonScalar for f64 {
    fn from_text(text: &str) -> Option<Self> {
        if text.contains('/') {
            return parse_rational(text)?.to_f64();
        }
        text.trim().parse().ok().filter(|x: &f64| x.is_finite())
    }

    fn to_json(&self) -> Value {
        // shortest representation that reads back to the same bits
        Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }
}

impl JsonScalar for BigRational {
    fn from_text(text: &str) -> Option<Self> {
        parse_rational(text)
    }

    fn to_json(&self) -> Value {
        if self.denom().is_one() {
            serde_json::from_str::<Number>(&self.numer().to_string()).map_or(Value::Null, Value::Number)
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
}

fn perr(path: &str, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), msg: msg.into() }
}

fn scalar<T: JsonScalar>(v: &Value, path: &str) -> Result<T> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(perr(path, "expected a number or a \"num/den\" string")),
    };
    T::from_text(&text).ok_or_else(|| perr(path, format!("cannot read {text:?} as a number")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(path, "expected an array"))
}

fn factors<T: JsonScalar>(obj: &Map<String, Value>, key: &str, k: usize) -> Result<Vec<SymMat<T>>> {
    let path = format!("$.{key}");
    let list = array(obj.get(key).ok_or_else(|| perr(&path, "missing"))?, &path)?;
    if list.is_empty() {
        return Err(perr(&path, "needs at least one factor"));
    }
    let n = sym_dim(k);
    list.iter()
        .enumerate()
        .map(|(i, f)| {
            let fp = format!("{path}[{i}]");
            let entries = array(f, &fp)?;
            if entries.len() != n {
                return Err(perr(&fp, format!("expected {n} upper-triangle entries, found {}", entries.len())));
            }
            let upper = entries
                .iter()
                .enumerate()
                .map(|(j, x)| scalar(x, &format!("{fp}[{j}]")))
                .collect::<Result<Vec<T>>>()?;
            SymMat::new(k, upper).map_err(|e| perr(&fp, e.to_string()))
        })
        .collect()
}

/// Parses a factorization; errors name the offending JSON path.
pub fn parse_factorization<T: JsonScalar>(text: &str) -> Result<PsdFactorization<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr("$", e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| perr("$", "expected an object"))?;
    let k = obj
        .get("k")
        .ok_or_else(|| perr("$.k", "missing"))?
        .as_u64()
        .filter(|&k| k >= 1)
        .ok_or_else(|| perr("$.k", "expected a positive integer"))? as usize;
    let a = factors(obj, "A", k)?;
    let b = factors(obj, "B", k)?;
    let m = match obj.get("M") {
        None | Some(Value::Null) => None,
        Some(mv) => {
            let rows = array(mv, "$.M")?;
            if rows.len() != a.len() {
                return Err(perr("$.M", format!("expected {} rows, found {}", a.len(), rows.len())));
            }
            let m = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let rp = format!("$.M[{i}]");
                    let r = array(r, &rp)?;
                    if r.len() != b.len() {
                        return Err(perr(&rp, format!("expected {} entries, found {}", b.len(), r.len())));
                    }
                    r.iter().enumerate().map(|(j, x)| scalar(x, &format!("{rp}[{j}]"))).collect()
                })
                .collect::<Result<Vec<Vec<T>>>>()?;
            Some(m)
        }
    };
    Ok(PsdFactorization { k, a, b, m })
}

pub fn factorization_to_json<T: JsonScalar>(f: &PsdFactorization<T>) -> Value {
    let fac = |xs: &[SymMat<T>]| {
        Value::Array(xs.iter().map(|x| Value::Array(x.upper().iter().map(T::to_json).collect())).collect())
    };
    let mut obj = Map::new();
    obj.insert("k".into(), json!(f.k));
    obj.insert("A".into(), fac(&f.a));
    obj.insert("B".into(), fac(&f.b));
    if let Some(m) = &f.m {
        obj.insert(
            "M".into(),
            Value::Array(m.iter().map(|r| Value::Array(r.iter().map(T::to_json).collect())).collect()),
        );
    }
    Value::Object(obj)
}

pub fn motion_to_json(d: &MotionMatrix) -> Value {
    Value::Array(d.rows().iter().map(|r| Value::Array(r.iter().map(f64::to_json).collect())).collect())
}

fn verdict_json(v: Verdict) -> Value {
    match v.as_bool() {
        Some(b) => Value::Bool(b),
        None => Value::String(v.to_string()),
    }
}

pub fn report_to_json(r: &RigidityReport, tol: f64) -> Value {
    let mut obj = Map::new();
    obj.insert("one_inf_rigid".into(), verdict_json(r.one_inf_rigid));
    obj.insert("two_inf_rigid".into(), Value::Bool(r.two_inf_rigid));
    obj.insert("locally_rigid".into(), verdict_json(r.locally_rigid));
    obj.insert("globally_rigid".into(), verdict_json(r.globally_rigid));
    match &r.witness {
        Some(Witness::Triple(t)) => {
            let (a, b) = t.one_based();
            obj.insert("witness_triple".into(), json!([a, b]));
        }
        Some(Witness::Motion(d)) => {
            obj.insert("motion".into(), motion_to_json(d));
        }
        None => {}
    }
    obj.insert("zero_count".into(), json!(r.zero_count));
    obj.insert("preconditions_met".into(), json!(r.preconditions_met));
    obj.insert("violations".into(), json!(r.violations));
    obj.insert("notes".into(), json!(r.notes));
    obj.insert("tolerance".into(), tol.to_json());
    Value::Object(obj)
}

/// Report for an input refused on preconditions.
pub fn refusal_to_json(violations: &[String], tol: f64) -> Value {
    json!({ "preconditions_met": false, "violations": violations, "tolerance": tol.to_json() })
}

pub fn boundary_to_json(r: &BoundaryReport, tol: f64) -> Value {
    json!({ "verdict": r.verdict.to_string(), "evidence": r.evidence, "tolerance": tol.to_json() })
}

pub fn validation_to_json(r: &ValidationReport, tol: f64) -> Value {
    let psd: Vec<String> = r.psd_failures.iter().map(|(s, i)| format!("{s}{}", i + 1)).collect();
    let mism: Vec<[usize; 2]> = r.mismatches.iter().map(|&(i, j)| [i + 1, j + 1]).collect();
    json!({
        "valid": r.is_valid(),
        "shape_ok": r.shape_ok,
        "psd_failures": psd,
        "mismatches": mism,
        "max_mismatch": r.max_mismatch.to_json(),
        "tolerance": tol.to_json(),
    })
}

pub fn oracle_to_json(v: &OracleVerdict, s: usize) -> Value {
    let mut obj = Map::new();
    obj.insert("s".into(), json!(s));
    obj.insert("found_nontrivial".into(), json!(v.found_nontrivial));
    obj.insert("trials_used".into(), json!(v.trials_used));
    obj.insert("seed".into(), json!(v.seed));
    if let Some(d) = &v.motion {
        obj.insert("motion".into(), motion_to_json(d));
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_f64() {
        let text = r#"{"k":2,"A":[[1,0,0],[0.1,"1/3",2]],"B":[[0,0,1],[1,1,1]]}"#;
        let f: PsdFactorization<f64> = parse_factorization(text).unwrap();
        assert_eq!(f.a[1].get(0, 1), &(1.0 / 3.0));
        let back: PsdFactorization<f64> = parse_factorization(&factorization_to_json(&f).to_string()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn exact_mode_keeps_literals() {
        let f: PsdFactorization<BigRational> =
            parse_factorization(r#"{"k":2,"A":[[0.1,2,"1/3"]],"B":[[1e-2,0,1]]}"#).unwrap();
        assert_eq!(f.a[0].get(0, 0), &parse_rational("1/10").unwrap());
        assert_eq!(f.b[0].get(0, 0), &parse_rational("1/100").unwrap());
        let v = factorization_to_json(&f);
        assert_eq!(v["A"][0], json!(["1/10", 2, "1/3"]));
    }

    #[test]
    fn errors_name_the_path() {
        let e = parse_factorization::<f64>(r#"{"k":2,"A":[[1,0,0],[1,true,0]],"B":[[1,0,0]]}"#).unwrap_err();
        assert_eq!(
            e,
            Error::Parse { path: "$.A[1][1]".into(), msg: "expected a number or a \"num/den\" string".into() }
        );
        let e = parse_factorization::<f64>(r#"{"k":2,"A":[[1,0]],"B":[[1,0,0]]}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { path, .. } if path == "$.A[0]"));
    }
}
