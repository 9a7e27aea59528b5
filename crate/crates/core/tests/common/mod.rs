#![allow(dead_code)]

use psdrigid_core::factorization::PsdFactorization;
use psdrigid_core::scalar::parse_rational;
use psdrigid_core::symcore::Vec2;
use psdrigid_core::{FactorizationF64, FactorizationQ, Rational};

pub const TOL: f64 = 1e-9;

pub const RIGID_A: [(f64, f64); 3] = [(1.0, 0.0), (0.5, -0.5), (0.0, 1.0)];
pub const RIGID_B: [(f64, f64); 3] = [(0.5, 1.5), (0.5, -0.5), (1.0, 0.25)];
pub const FLEX_A: [(f64, f64); 3] = [(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)];
pub const FLEX_B: [(f64, f64); 3] = [(1.0, 5.0), (1.0, 6.0), (1.0, 7.0)];
pub const DERANGEMENT_A: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (1.0, -1.0)];
pub const DERANGEMENT_B: [(f64, f64); 3] = [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];

pub fn vecs(v: &[(f64, f64)]) -> Vec<Vec2<f64>> {
    v.iter().map(|&(x, y)| Vec2(x, y)).collect()
}

pub fn fac(a: &[(f64, f64)], b: &[(f64, f64)]) -> FactorizationF64 {
    PsdFactorization::from_vectors(&vecs(a), &vecs(b)).unwrap().with_reconstructed_m().unwrap()
}

pub fn rigid() -> FactorizationF64 {
    fac(&RIGID_A, &RIGID_B)
}

pub fn flexible() -> FactorizationF64 {
    fac(&FLEX_A, &FLEX_B)
}

pub fn derangement() -> FactorizationF64 {
    fac(&DERANGEMENT_A, &DERANGEMENT_B)
}

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn qvecs(v: &[(&str, &str)]) -> Vec<Vec2<Rational>> {
    v.iter().map(|&(x, y)| Vec2(q(x), q(y))).collect()
}

pub fn rigid_exact() -> FactorizationQ {
    let a = qvecs(&[("1", "0"), ("1/2", "-1/2"), ("0", "1")]);
    let b = qvecs(&[("1/2", "3/2"), ("1/2", "-1/2"), ("1", "1/4")]);
    PsdFactorization::from_vectors(&a, &b).unwrap().with_reconstructed_m().unwrap()
}

pub fn flexible_exact() -> FactorizationQ {
    let a = qvecs(&[("1", "2"), ("1", "3"), ("1", "4")]);
    let b = qvecs(&[("1", "5"), ("1", "6"), ("1", "7")]);
    PsdFactorization::from_vectors(&a, &b).unwrap().with_reconstructed_m().unwrap()
}

/// Random rotation by `theta`.
pub fn rotation(theta: f64) -> Vec<Vec<f64>> {
    let (c, s) = (theta.cos(), theta.sin());
    vec![vec![c, -s], vec![s, c]]
}
