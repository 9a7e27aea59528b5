//! The s-infinitesimal motion predicate: every principal minor of
//! `X + tẊ`, truncated at order s, must be nonnegative on some [0, ε).

use crate::error::{Error, Result};
use crate::factorization::{PsdFactorization, Side};
use crate::symcore::{index_subsets, sym_dim, SymMat};

use super::MotionMatrix;

type Poly = Vec<f64>;

fn poly_mul(a: &Poly, b: &Poly, deg: usize) -> Poly {
    let mut out = vec![0.0; deg + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= deg {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_det(m: &[Vec<Poly>], deg: usize) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = vec![0.0; deg + 1];
    for c in 0..n {
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = poly_mul(&m[0][c], &poly_det(&minor, deg), deg);
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        for (a, t) in acc.iter_mut().zip(term) {
            *a += sign * t;
        }
    }
    acc
}

/// Coefficients `c0..c_deg` of `det([X + tẊ]_I)` truncated at degree `deg`.
pub fn minor_polynomial(x: &SymMat<f64>, xdot: &SymMat<f64>, idx: &[usize], deg: usize) -> Vec<f64> {
    let m: Vec<Vec<Poly>> = idx
        .iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| {
                    let mut p = vec![0.0; deg + 1];
                    p[0] = *x.get(i, j);
                    if deg >= 1 {
                        p[1] = *xdot.get(i, j);
                    }
                    p
                })
                .collect()
        })
        .collect();
    poly_det(&m, deg)
}

/// A polynomial is nonnegative near 0⁺ iff its lowest coefficient exceeding
/// `thresh` in magnitude is positive, or none does.
pub fn first_nonzero_nonnegative(coeffs: &[f64], thresh: f64) -> bool {
    coeffs.iter().find(|c| c.abs() > thresh).is_none_or(|c| *c > 0.0)
}

// c_j is homogeneous of degree |I| − j in X and j in Ẋ; thresholds follow
fn factor_ok(x: &SymMat<f64>, xdot: &SymMat<f64>, s: usize, tol: f64) -> bool {
    let (sx, sd) = (x.max_abs(), xdot.max_abs());
    index_subsets(x.k()).iter().all(|idx| {
        let c = minor_polynomial(x, xdot, idx, s);
        let n = idx.len() as i32;
        c.iter()
            .enumerate()
            .find(|&(j, c)| c.abs() > tol * sx.powi(n - j as i32) * sd.powi(j as i32))
            .is_none_or(|(_, c)| *c > 0.0)
    })
}

/// Decides whether D induces an s-infinitesimal motion of F.
pub fn is_s_inf_motion(f: &PsdFactorization<f64>, d: &MotionMatrix, s: usize, tol: f64) -> Result<bool> {
    if d.n() != sym_dim(f.k) {
        return Err(Error::DimensionMismatch { expected: sym_dim(f.k), found: d.n() });
    }
    for side in [Side::A, Side::B] {
        for x in f.factors(side) {
            if !factor_ok(x, &d.derivative(x, side), s, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_examples() {
        assert!(first_nonzero_nonnegative(&[0.0, 1.0, -5.0], 1e-9));
        assert!(!first_nonzero_nonnegative(&[0.0, 0.0, -5.0], 1e-9));
        assert!(first_nonzero_nonnegative(&[1e-12, -1e-12, 0.0], 1e-9));
        assert!(first_nonzero_nonnegative(&[2.0, -100.0], 1e-9));
    }

    #[test]
    fn determinant_polynomial_of_rank_one() {
        // X = e1 e1ᵀ, Ẋ = [[0,1],[1,0]]: det = -t²
        let x = SymMat::from_entries2(1.0, 0.0, 0.0);
        let xd = SymMat::from_entries2(0.0, 1.0, 0.0);
        assert_eq!(minor_polynomial(&x, &xd, &[0, 1], 2), vec![0.0, 0.0, -1.0]);
        assert_eq!(minor_polynomial(&x, &xd, &[0, 1], 1), vec![0.0, 0.0]);
    }
}
