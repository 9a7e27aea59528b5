use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use psdrigid_core::scalar::parse_rational;
use psdrigid_core::symcore::*;
use psdrigid_core::{Error, SymMatF64, SymMatQ};

fn sym(x11: f64, x12: f64, x22: f64) -> SymMatF64 {
    SymMat::from_entries2(x11, x12, x22)
}

fn trace_prod(x: &SymMatF64, y: &SymMatF64) -> f64 {
    let (a, b) = (x.to_rows(), y.to_rows());
    let k = x.k();
    (0..k).map(|i| (0..k).map(|j| a[i][j] * b[j][i]).sum::<f64>()).sum()
}

fn arb_sym(k: usize) -> impl Strategy<Value = SymMatF64> {
    prop::collection::vec(-5.0..5.0f64, sym_dim(k)).prop_map(move |u| SymMat::new(k, u).unwrap())
}

#[test]
fn vec_examples() {
    assert_eq!(vec_sym(&SymMatF64::identity(2)), vec![1.0, 1.0, 0.0]);
    assert_eq!(vec_sym(&sym(1.0, 2.0, 4.0)), vec![1.0, 4.0, 2.0 * SQRT_2]);
}

#[test]
fn vec_order_for_k3() {
    let x = SymMat::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 5.0], vec![3.0, 5.0, 6.0]]).unwrap();
    let v = vec_sym(&x);
    assert_eq!(v[..3], [1.0, 4.0, 6.0]);
    assert_eq!(v[3..], [2.0 * SQRT_2, 3.0 * SQRT_2, 5.0 * SQRT_2]);
    assert_eq!(unvec_sym(3, &v).unwrap(), x);
}

#[test]
fn inner_examples() {
    let i = SymMatF64::identity(2);
    assert_eq!(inner(&i, &i).unwrap(), 2.0);
    let a = SymMat::outer(&Vec2(1.0, 0.0));
    let b = SymMat::outer(&Vec2(1.0, 1.0));
    assert_eq!(inner(&a, &b).unwrap(), 1.0);
    assert!(matches!(inner(&i, &SymMatF64::identity(3)), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn principal_minor_examples() {
    let x = sym(1.0, 0.0, 0.0);
    assert_eq!(principal_minor(&x, &[0]).unwrap(), 1.0);
    assert_eq!(principal_minor(&x, &[0, 1]).unwrap(), 0.0);
    assert!(principal_minor(&x, &[]).is_err());
    assert!(principal_minor(&x, &[2]).is_err());
}

#[test]
fn psd_status_examples() {
    assert_eq!(psd_status(&sym(1.0, 0.0, 0.0), 1e-9), PsdStatus { rank: 1, psd: true });
    assert_eq!(psd_status(&sym(0.0, 1.0, 0.0), 1e-9), PsdStatus { rank: 2, psd: false });
    assert_eq!(psd_status(&sym(1.0, 2.0, 4.0), 1e-9), PsdStatus { rank: 1, psd: true });
}

#[test]
fn small_coordinate_survives_extraction() {
    // x11 = 1e-10 is below the tolerance but the coordinate 1e-5 is not
    let v = rank_one_vector(&SymMat::outer(&Vec2(1e-5f64, 0.9)), 1e-9).unwrap();
    assert!((v.0 - 1e-5).abs() < 1e-15 && (v.1 - 0.9).abs() < 1e-15);
    let v = rank_one_vector(&sym(1e-33, 3e-17, 0.9), 1e-9).unwrap();
    assert_eq!(v.0, 0.0);
}

#[test]
fn rank_one_vector_examples() {
    let v = rank_one_vector(&sym(0.25, -0.25, 0.25), 1e-9).unwrap();
    assert_eq!(v, Vec2(0.5, -0.5));
    assert_eq!(rank_one_vector(&sym(0.0, 0.0, 1.0), 1e-9).unwrap(), Vec2(0.0, 1.0));
    assert!(matches!(rank_one_vector(&SymMatF64::identity(2), 1e-9), Err(Error::NotRankOne(2))));
}

#[test]
fn rank_one_exact_uses_scale_when_sqrt_is_irrational() {
    let q = |s: &str| parse_rational(s).unwrap();
    let x: SymMatQ = SymMat::from_entries2(q("2"), q("2"), q("2"));
    let (v, s) = rank_one_factor(&x, 1e-9).unwrap();
    let back = SymMat::outer(&v).scale(&s);
    assert_eq!(back, x);
    let y: SymMatQ = SymMat::from_entries2(q("1/4"), q("-1/4"), q("1/4"));
    assert_eq!(rank_one_vector(&y, 0.0).unwrap(), Vec2(q("1/2"), q("-1/2")));
}

#[test]
fn det2_examples() {
    assert_eq!(det2(&Vec2(1.0, 0.0), &Vec2(0.0, 1.0)), 1.0);
    assert_eq!(det2(&Vec2(1.0, 2.0), &Vec2(2.0, 4.0)), 0.0);
}

#[test]
fn index_helpers_agree() {
    for k in 2..5 {
        for m in 0..sym_dim(k) {
            let (i, j) = sym_pair(k, m);
            assert_eq!(sym_index(k, i, j), m);
        }
    }
}

proptest! {
    #[test]
    fn vec_preserves_inner_products(x in arb_sym(2), y in arb_sym(2)) {
        let d: f64 = vec_sym(&x).iter().zip(vec_sym(&y)).map(|(a, b)| a * b).sum();
        let t = trace_prod(&x, &y);
        prop_assert!((d - t).abs() <= 1e-12 * t.abs().max(1.0));
        prop_assert!((inner(&x, &y).unwrap() - t).abs() <= 1e-12 * t.abs().max(1.0));
    }

    #[test]
    fn vec_preserves_inner_products_k3(x in arb_sym(3), y in arb_sym(3)) {
        let d: f64 = vec_sym(&x).iter().zip(vec_sym(&y)).map(|(a, b)| a * b).sum();
        let t = trace_prod(&x, &y);
        prop_assert!((d - t).abs() <= 1e-11 * t.abs().max(1.0));
    }

    #[test]
    fn outer_inner_is_squared_dot(a in (-3.0..3.0f64, -3.0..3.0f64), b in (-3.0..3.0f64, -3.0..3.0f64)) {
        let (a, b) = (Vec2(a.0, a.1), Vec2(b.0, b.1));
        let got = inner(&SymMat::outer(&a), &SymMat::outer(&b)).unwrap();
        let want = a.dot(&b).powi(2);
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn outer_is_psd_rank_le_one(a in (-3.0..3.0f64, -3.0..3.0f64)) {
        let st = psd_status(&SymMat::outer(&Vec2(a.0, a.1)), 1e-9);
        prop_assert!(st.psd && st.rank <= 1);
    }

    #[test]
    fn rank_one_vector_reproduces(a in (0.1..3.0f64, -3.0..3.0f64), flip in any::<bool>()) {
        let a = if flip { Vec2(-a.0, -a.1) } else { Vec2(a.0, a.1) };
        let x = SymMat::outer(&a);
        let v = rank_one_vector(&x, 1e-9).unwrap();
        prop_assert!(v.0 > 0.0);
        let back = SymMat::outer(&v);
        prop_assert!(back.upper().iter().zip(x.upper()).all(|(p, q)| (p - q).abs() <= 1e-9 * x.max_abs()));
    }

    #[test]
    fn minor_of_full_set_matches_cofactor(x in arb_sym(2)) {
        let r = x.to_rows();
        let want = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        prop_assert_eq!(principal_minor(&x, &[0, 1]).unwrap(), want);
    }

    #[test]
    fn principal_minor_permutation_invariant(x in arb_sym(3), perm in Just([2usize, 0, 1])) {
        // P X Pᵀ with I mapped through the same permutation
        let r = x.to_rows();
        let y = SymMat::from_rows(&(0..3).map(|i| (0..3).map(|j| r[perm[i]][perm[j]]).collect()).collect::<Vec<_>>()).unwrap();
        let inv = |i: usize| perm.iter().position(|&p| p == i).unwrap();
        for idx in index_subsets(3) {
            let mut mapped: Vec<usize> = idx.iter().map(|&i| inv(i)).collect();
            mapped.sort();
            let (a, b) = (principal_minor(&x, &idx).unwrap(), principal_minor(&y, &mapped).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn det2_antisymmetric(u in (-3.0..3.0f64, -3.0..3.0f64), v in (-3.0..3.0f64, -3.0..3.0f64)) {
        let (u, v) = (Vec2(u.0, u.1), Vec2(v.0, v.1));
        prop_assert_eq!(det2(&u, &v), -det2(&v, &u));
    }
}
