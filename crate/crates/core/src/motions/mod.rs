//! Infinitesimal motions `vec(Ȧ) = vec(A)·D`, `vec(Ḃ) = −D·vec(B)`.
//!
//! D is stored row-major, so its flattening is
//! `(D11, D12, D13, D21, …, D33)` for k = 2.

mod cone;
mod lp;
mod solve;
mod taylor;

pub use cone::{
    alpha_row, beta_quadratic, build_cone_system, left_kernel_formula, left_kernel_minors, lift_reduced,
    right_kernel_structured, ConeSystem, MinorKernel, RowLabel, Variant, REDUCED_COLUMNS,
};
pub use lp::{cone_full_dimensional, cone_interior_point, implicit_equalities, strict_feasibility, LpCertificate};
pub use solve::{solve_two_inf_no_orth, solve_two_inf_one_orth, solve_two_inf_two_orth, MotionKind, MotionSpace};
pub use taylor::{first_nonzero_nonnegative, is_s_inf_motion, minor_polynomial};

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::factorization::{PsdFactorization, Side};
use crate::symcore::{sym_dim, sym_index, sym_pair, unvec_sym, vec_sym, SymMat};

#[derive(Clone, Debug, PartialEq)]
pub struct MotionMatrix {
    n: usize,
    d: Vec<f64>,
}

impl MotionMatrix {
    pub fn from_row_major(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: d.len() });
        }
        Ok(MotionMatrix { n, d })
    }

    pub fn from_rows(rows: &[[f64; 3]; 3]) -> Self {
        MotionMatrix { n: 3, d: rows.iter().flatten().copied().collect() }
    }

    pub fn zeros(n: usize) -> Self {
        MotionMatrix { n, d: vec![0.0; n * n] }
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.d[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.d[r * self.n + c] = v;
    }

    /// Row-major flattening (`vec9` for k = 2).
    pub fn vec9(&self) -> &[f64] {
        &self.d
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.d)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        MotionMatrix { n, d: (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect() }
    }

    pub fn from_flat(v: &DVector<f64>) -> Self {
        let n = (v.len() as f64).sqrt().round() as usize;
        MotionMatrix { n, d: v.iter().copied().collect() }
    }

    pub fn to_flat(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.d)
    }

    pub fn frobenius(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        MotionMatrix { n: self.n, d: self.d.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, o: &MotionMatrix) -> Self {
        MotionMatrix { n: self.n, d: self.d.iter().zip(&o.d).map(|(x, y)| x + y).collect() }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `vec(X)·D`
    pub fn act_row(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|c| (0..self.n).map(|r| x[r] * self.get(r, c)).sum()).collect()
    }

    /// `−D·vec(X)`
    pub fn act_col_neg(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|r| -(0..self.n).map(|c| self.get(r, c) * x[c]).sum::<f64>()).collect()
    }

    /// Derivative of a factor on the given side.
    pub fn derivative(&self, x: &SymMat<f64>, side: Side) -> SymMat<f64> {
        let v = vec_sym(x);
        let w = match side {
            Side::A => self.act_row(&v),
            Side::B => self.act_col_neg(&v),
        };
        unvec_sym(x.k(), &w).expect("dimension checked by caller")
    }
}

impl fmt::Display for MotionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>12.6}")).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// D1..D4: the 1-trivial motions for k = 2.
pub fn trivial_basis_k2() -> [MotionMatrix; 4] {
    [
        MotionMatrix::from_rows(&[[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
        MotionMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]),
        MotionMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, SQRT_2], [SQRT_2, 0.0, 0.0]]),
        MotionMatrix::from_rows(&[[0.0, 0.0, SQRT_2], [0.0, 0.0, 0.0], [0.0, SQRT_2, 0.0]]),
    ]
}

/// Tangent generators of the GL(k) orbit: k of the first type (one per
/// diagonal entry), then k(k−1) of the second type for ordered pairs i ≠ j.
pub fn trivial_basis_general(k: usize) -> Vec<MotionMatrix> {
    let n = sym_dim(k);
    let ix = |i: usize, j: usize| sym_index(k, i, j);
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        let mut d = MotionMatrix::zeros(n);
        d.set(ix(i, i), ix(i, i), 2.0);
        for j in (0..k).filter(|&j| j != i) {
            d.set(ix(i, j), ix(i, j), 1.0);
        }
        out.push(d);
    }
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let mut d = MotionMatrix::zeros(n);
            d.set(ix(i, j), ix(j, j), SQRT_2);
            d.set(ix(i, i), ix(i, j), SQRT_2);
            for l in (0..k).filter(|&l| l != i && l != j) {
                d.set(ix(i, l), ix(j, l), 1.0);
            }
            out.push(d);
        }
    }
    out
}

/// The matrix 𝒮 with `vec(Sᵀ X S) = vec(X)·𝒮`.
pub fn induced_matrix(s: &[Vec<f64>]) -> DMatrix<f64> {
    let k = s.len();
    let n = sym_dim(k);
    let mut out = DMatrix::zeros(n, n);
    for r in 0..n {
        let mut e = vec![0.0; n];
        e[r] = 1.0;
        let x = unvec_sym(k, &e).unwrap();
        let y = vec_sym(&x.congruence(s));
        for c in 0..n {
            out[(r, c)] = y[c];
        }
    }
    out
}

/// Transports a motion of F to the corresponding motion `𝒮⁻¹ D 𝒮` of
/// `gl_act(F, S)`.
pub fn conjugate(d: &MotionMatrix, s: &[Vec<f64>]) -> Result<MotionMatrix> {
    let sm = induced_matrix(s);
    let inv = sm.clone().try_inverse().ok_or(Error::Singular)?;
    Ok(MotionMatrix::from_dmatrix(&(inv * d.to_dmatrix() * sm)))
}

/// Inverse of [`conjugate`]: `𝒮 D 𝒮⁻¹`.
pub fn unconjugate(d: &MotionMatrix, s: &[Vec<f64>]) -> Result<MotionMatrix> {
    let sm = induced_matrix(s);
    let inv = sm.clone().try_inverse().ok_or(Error::Singular)?;
    Ok(MotionMatrix::from_dmatrix(&(sm * d.to_dmatrix() * inv)))
}

/// The size-k factorization whose k-infinitesimal motions are only dI:
/// `A^(i) = B^(i) = E_ii`, then for i < j `A^(i,j)` with +1 on the (i,i),(j,j)
/// entries and −1 on (i,j), and `B^(i,j)` all ones on the {i,j} block.
pub fn k_trivial_witness(k: usize) -> PsdFactorization<f64> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..k {
        let mut e = SymMat::zeros(k);
        e.set(i, i, 1.0);
        a.push(e.clone());
        b.push(e);
    }
    for m in k..sym_dim(k) {
        let (i, j) = sym_pair(k, m);
        let mut x = SymMat::zeros(k);
        let mut y = SymMat::zeros(k);
        for (p, q) in [(i, i), (j, j)] {
            x.set(p, q, 1.0);
            y.set(p, q, 1.0);
        }
        x.set(i, j, -1.0);
        y.set(i, j, 1.0);
        a.push(x);
        b.push(y);
    }
    PsdFactorization::new(a, b).expect("k ≥ 1").with_reconstructed_m().expect("nonempty")
}
