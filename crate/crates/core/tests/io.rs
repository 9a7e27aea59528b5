mod common;

use common::*;
use proptest::prelude::*;
use psdrigid_core::classify::{boundary_report, classify_no_orth};
use psdrigid_core::factorization::{generate_rank_one, validate};
use psdrigid_core::io::*;
use psdrigid_core::{Error, FactorizationF64, FactorizationQ};
use serde_json::json;

#[test]
fn exact_round_trip() {
    let f = rigid_exact();
    let text = factorization_to_json(&f).to_string();
    let g: FactorizationQ = parse_factorization(&text).unwrap();
    assert_eq!(g, f);
    assert_eq!(factorization_to_json(&f)["B"][0], json!(["1/4", "3/4", "9/4"]));
}

#[test]
fn exact_text_reads_as_float() {
    let text = factorization_to_json(&rigid_exact()).to_string();
    let g: FactorizationF64 = parse_factorization(&text).unwrap();
    assert_eq!(g, rigid());
}

#[test]
fn report_keys() {
    let v = report_to_json(&classify_no_orth(&rigid(), TOL).unwrap(), TOL);
    assert_eq!(v["globally_rigid"], json!(true));
    assert_eq!(v["witness_triple"], json!([[1, 2, 3], [1, 2, 3]]));
    assert_eq!(v["tolerance"], json!(1e-9));
    let v = report_to_json(&classify_no_orth(&flexible(), TOL).unwrap(), TOL);
    assert_eq!(v["one_inf_rigid"], json!(false));
    assert_eq!(v["motion"].as_array().unwrap().len(), 3);
    assert_eq!(boundary_to_json(&boundary_report(&rigid(), TOL).unwrap(), TOL)["verdict"], "boundary_consistent");
    let v = validation_to_json(&validate(&rigid(), TOL), TOL);
    assert_eq!(v["valid"], json!(true));
}

#[test]
fn parse_errors() {
    let e = parse_factorization::<f64>(r#"{"A":[[1,0,0]],"B":[[1,0,0]]}"#).unwrap_err();
    assert!(matches!(e, Error::Parse { path, .. } if path == "$.k"));
    let e = parse_factorization::<f64>(r#"{"k":2,"A":[],"B":[[1,0,0]]}"#).unwrap_err();
    assert!(matches!(e, Error::Parse { path, .. } if path == "$.A"));
    let e = parse_factorization::<f64>(r#"{"k":2,"A":[[1,0,0]],"B":[[1,0,0]],"M":[[1,2]]}"#).unwrap_err();
    assert!(matches!(e, Error::Parse { path, .. } if path == "$.M[0]"));
    assert!(parse_factorization::<f64>("not json").is_err());
}

proptest! {
    #[test]
    fn float_round_trip_is_bit_exact(seed in 0u64..10_000, p in 3usize..6) {
        let f = generate_rank_one(p, 3, &[(0, 0)], seed).unwrap();
        let g: FactorizationF64 = parse_factorization(&factorization_to_json(&f).to_string()).unwrap();
        prop_assert_eq!(g, f);
    }
}
