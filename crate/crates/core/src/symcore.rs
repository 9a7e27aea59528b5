//! Symmetric matrices, their √2-scaled half-vectorization, and the rank-one
//! utilities the classifiers sit on.

use std::fmt;

use crate::dense;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Position of the pair (i, j) in the half-vectorization: diagonal entries
/// first, then off-diagonals in the order 12, 13, …, 1k, 23, …
pub fn sym_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    if i == j {
        i
    } else {
        k + i * k - i * (i + 1) / 2 + (j - i - 1)
    }
}

/// Inverse of [`sym_index`].
pub fn sym_pair(k: usize, m: usize) -> (usize, usize) {
    if m < k {
        return (m, m);
    }
    let mut off = m - k;
    for i in 0..k {
        let len = k - i - 1;
        if off < len {
            return (i, i + 1 + off);
        }
        off -= len;
    }
    panic!("index {m} out of range for k = {k}");
}

pub fn sym_dim(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Real symmetric k×k matrix stored by its upper triangle in row order
/// (for k = 2: `[x11, x12, x22]`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat<T> {
    k: usize,
    upper: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsdStatus {
    pub rank: usize,
    pub psd: bool,
}

/// A vector in the plane; rank-one factors are `v vᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2<T>(pub T, pub T);

/// Half-vectorization `(X11, …, Xkk, √2·X12, …)`.
pub type SymVec<T> = Vec<T>;

impl<T: Scalar> SymMat<T> {
    pub fn new(k: usize, upper: Vec<T>) -> Result<Self> {
        if k == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if upper.len() != sym_dim(k) {
            return Err(Error::DimensionMismatch { expected: sym_dim(k), found: upper.len() });
        }
        Ok(SymMat { k, upper })
    }

    /// 2×2 matrix `[[x11, x12], [x12, x22]]`.
    pub fn from_entries2(x11: T, x12: T, x22: T) -> Self {
        SymMat { k: 2, upper: vec![x11, x12, x22] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let k = rows.len();
        let mut upper = Vec::with_capacity(sym_dim(k));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: row.len() });
            }
            for j in i..k {
                if rows[j][i] != row[j] {
                    return Err(Error::NotSymmetric);
                }
                upper.push(row[j].clone());
            }
        }
        SymMat::new(k, upper)
    }

    pub fn zeros(k: usize) -> Self {
        SymMat { k, upper: vec![T::zero(); sym_dim(k)] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.set(i, i, T::one());
        }
        m
    }

    /// `v vᵀ` for a planar vector.
    pub fn outer(v: &Vec2<T>) -> Self {
        let Vec2(x, y) = v;
        Self::from_entries2(x.clone() * x.clone(), x.clone() * y.clone(), y.clone() * y.clone())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.upper[row_major_upper(self.k, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let p = row_major_upper(self.k, i, j);
        self.upper[p] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.k).map(|i| (0..self.k).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn scale(&self, c: &T) -> Self {
        SymMat { k: self.k, upper: self.upper.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().map(|x| x.abs().as_f64()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> T {
        (0..self.k).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> SymMat<U> {
        SymMat { k: self.k, upper: self.upper.iter().map(f).collect() }
    }

    /// Sᵀ X S for a k×k matrix S given by rows.
    pub fn congruence(&self, s: &[Vec<T>]) -> Self {
        let k = self.k;
        let x = self.to_rows();
        let mut out = Self::zeros(k);
        for i in 0..k {
            for j in i..k {
                let mut acc = T::zero();
                for a in 0..k {
                    for b in 0..k {
                        acc = acc + s[a][i].clone() * x[a][b].clone() * s[b][j].clone();
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

// row i of the upper triangle starts at i·k − i(i−1)/2
fn row_major_upper(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    assert!(j < k, "index ({i},{j}) out of range for k = {k}");
    i * k - i * i.saturating_sub(1) / 2 + (j - i)
}

impl<T: Scalar> fmt::Display for SymMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")).collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

impl<T: Scalar> Vec2<T> {
    pub fn dot(&self, o: &Vec2<T>) -> T {
        self.0.clone() * o.0.clone() + self.1.clone() * o.1.clone()
    }

    pub fn norm_f64(&self) -> f64 {
        self.0.as_f64().hypot(self.1.as_f64())
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        Vec2(self.0.as_f64(), self.1.as_f64())
    }

    pub fn scale(&self, c: &T) -> Vec2<T> {
        Vec2(self.0.clone() * c.clone(), self.1.clone() * c.clone())
    }
}

/// `u1·v2 − u2·v1`.
pub fn det2<T: Scalar>(u: &Vec2<T>, v: &Vec2<T>) -> T {
    u.0.clone() * v.1.clone() - u.1.clone() * v.0.clone()
}

/// Half-vectorization; inner products are preserved.
pub fn vec_sym<T: Real>(x: &SymMat<T>) -> SymVec<T> {
    let k = x.k();
    let r2 = T::from_f64(std::f64::consts::SQRT_2).unwrap();
    let mut out = vec![T::zero(); sym_dim(k)];
    for i in 0..k {
        for j in i..k {
            let v = *x.get(i, j);
            out[sym_index(k, i, j)] = if i == j { v } else { v * r2 };
        }
    }
    out
}

/// Inverse of [`vec_sym`].
pub fn unvec_sym<T: Real>(k: usize, v: &[T]) -> Result<SymMat<T>> {
    if v.len() != sym_dim(k) {
        return Err(Error::DimensionMismatch { expected: sym_dim(k), found: v.len() });
    }
    let r2 = T::from_f64(std::f64::consts::SQRT_2).unwrap();
    let mut m = SymMat::zeros(k);
    for (p, x) in v.iter().enumerate() {
        let (i, j) = sym_pair(k, p);
        m.set(i, j, if i == j { *x } else { *x / r2 });
    }
    Ok(m)
}

/// `tr(XY)`.
pub fn inner<T: Scalar>(x: &SymMat<T>, y: &SymMat<T>) -> Result<T> {
    if x.k() != y.k() {
        return Err(Error::DimensionMismatch { expected: x.k(), found: y.k() });
    }
    let k = x.k();
    let two = T::one() + T::one();
    let mut acc = T::zero();
    for i in 0..k {
        acc = acc + x.get(i, i).clone() * y.get(i, i).clone();
        for j in i + 1..k {
            acc = acc + two.clone() * x.get(i, j).clone() * y.get(i, j).clone();
        }
    }
    Ok(acc)
}

/// Determinant of the principal submatrix on `idx` (0-based, any order).
pub fn principal_minor<T: Scalar>(x: &SymMat<T>, idx: &[usize]) -> Result<T> {
    if idx.is_empty() {
        return Err(Error::InvalidIndexSet("empty".into()));
    }
    let mut seen = vec![false; x.k()];
    for &i in idx {
        if i >= x.k() {
            return Err(Error::InvalidIndexSet(format!("index {} out of range for k = {}", i + 1, x.k())));
        }
        if seen[i] {
            return Err(Error::InvalidIndexSet(format!("index {} repeated", i + 1)));
        }
        seen[i] = true;
    }
    let sub: Vec<Vec<T>> = idx.iter().map(|&i| idx.iter().map(|&j| x.get(i, j).clone()).collect()).collect();
    Ok(dense::det(&sub))
}

/// All nonempty subsets of `0..k`, as sorted index lists.
pub fn index_subsets(k: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << k)).map(|mask| (0..k).filter(|&i| mask & (1 << i) != 0).collect()).collect()
}

/// Numeric rank and psd flag. For k = 2 the rank rule is scale aware:
/// rank ≤ 1 iff |det| ≤ tol·max(tr², ‖X‖²_F), rank 0 iff every entry is
/// negligible. A principal minor of order m counts as nonnegative when it is
/// ≥ −tol·max(1, ‖X‖_max)^m.
pub fn psd_status<T: Scalar>(x: &SymMat<T>, tol: f64) -> PsdStatus {
    let k = x.k();
    let scale = x.max_abs();
    let rank = if x.upper().iter().all(|v| v.negligible(tol)) {
        0
    } else if k == 2 {
        let d = principal_minor(x, &[0, 1]).unwrap();
        let tr = x.trace().as_f64();
        let fro2: f64 = x.to_rows().iter().flatten().map(|v| v.as_f64().powi(2)).sum();
        if d.negligible(tol * (tr * tr).max(fro2)) {
            1
        } else {
            2
        }
    } else {
        dense::rank(&x.to_rows(), tol)
    };
    let base = scale.max(1.0);
    let psd = index_subsets(k).iter().all(|idx| {
        let m = principal_minor(x, idx).unwrap();
        !m.is_negative() || m.negligible(tol * base.powi(idx.len() as i32))
    });
    PsdStatus { rank, psd }
}

/// A rank-one psd 2×2 factor as `scale · v vᵀ` with `scale > 0`. For floats
/// `scale = 1`; in exact mode a non-square diagonal falls back to a rational
/// direction with a compensating scale.
pub fn rank_one_factor<T: Scalar>(x: &SymMat<T>, tol: f64) -> Result<(Vec2<T>, T)> {
    if x.k() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x.k() });
    }
    let st = psd_status(x, tol);
    if !st.psd {
        return Err(Error::NotPsd);
    }
    if st.rank != 1 {
        return Err(Error::NotRankOne(st.rank));
    }
    if let Ok(v) = rank_one_vector(x, tol) {
        return Ok((v, T::one()));
    }
    let (x11, x12, x22) = (x.get(0, 0).clone(), x.get(0, 1).clone(), x.get(1, 1).clone());
    if x11 >= x22 {
        let s = T::one() / x11.clone();
        Ok((Vec2(x11, x12), s))
    } else {
        let s = T::one() / x22.clone();
        let v = if x12.is_negative() { Vec2(-x12, -x22) } else { Vec2(x12, x22) };
        Ok((v, s))
    }
}

/// Recover `a` with `a aᵀ = X`; the first nonzero coordinate is positive.
pub fn rank_one_vector<T: Scalar>(x: &SymMat<T>, tol: f64) -> Result<Vec2<T>> {
    if x.k() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x.k() });
    }
    let st = psd_status(x, tol);
    if !st.psd {
        return Err(Error::NotPsd);
    }
    if st.rank != 1 {
        return Err(Error::NotRankOne(st.rank));
    }
    let (x11, x12, x22) = (x.get(0, 0).clone(), x.get(0, 1).clone(), x.get(1, 1).clone());
    if x11 >= x22 {
        let r = x11.sqrt_checked().ok_or(Error::SqrtNotRepresentable)?;
        let second = x12 / r.clone();
        Ok(Vec2(r, second))
    } else {
        let r = x22.sqrt_checked().ok_or(Error::SqrtNotRepresentable)?;
        let mut first = x12 / r.clone();
        // only rounding noise is cleared; x11 = first² is far below tol
        // long before first is
        if first.negligible(tol * r.as_f64()) {
            first = T::zero();
        }
        if first.is_negative() {
            Ok(Vec2(-first, -r))
        } else {
            Ok(Vec2(first, r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_maps_round_trip() {
        for k in 2..6 {
            for m in 0..sym_dim(k) {
                let (i, j) = sym_pair(k, m);
                assert_eq!(sym_index(k, i, j), m);
                assert_eq!(sym_index(k, j, i), m);
            }
        }
        assert_eq!(sym_index(3, 0, 1), 3);
        assert_eq!(sym_index(3, 1, 2), 5);
    }

    #[test]
    fn storage_is_upper_row_order() {
        let x = SymMat::new(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(x.to_rows(), vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 5.0], vec![3.0, 5.0, 6.0]]);
    }

    #[test]
    fn vec_of_identity_and_rank_one() {
        assert_eq!(vec_sym(&SymMat::<f64>::identity(2)), vec![1.0, 1.0, 0.0]);
        let v = vec_sym(&SymMat::from_entries2(1.0, 2.0, 4.0));
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 4.0);
        assert!((v[2] - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn principal_minor_examples() {
        let x = SymMat::from_entries2(1.0, 0.0, 0.0);
        assert_eq!(principal_minor(&x, &[0]).unwrap(), 1.0);
        assert_eq!(principal_minor(&x, &[0, 1]).unwrap(), 0.0);
        assert!(principal_minor(&x, &[]).is_err());
        assert!(principal_minor(&x, &[2]).is_err());
    }

    #[test]
    fn psd_status_examples() {
        assert_eq!(psd_status(&SymMat::from_entries2(1.0, 0.0, 0.0), 1e-9), PsdStatus { rank: 1, psd: true });
        assert_eq!(psd_status(&SymMat::from_entries2(0.0, 1.0, 0.0), 1e-9), PsdStatus { rank: 2, psd: false });
        assert_eq!(psd_status(&SymMat::from_entries2(1.0, 2.0, 4.0), 1e-9), PsdStatus { rank: 1, psd: true });
    }

    #[test]
    fn rank_one_vector_examples() {
        let x = SymMat::from_entries2(0.25, -0.25, 0.25);
        assert_eq!(rank_one_vector(&x, 1e-9).unwrap(), Vec2(0.5, -0.5));
        assert_eq!(rank_one_vector(&SymMat::from_entries2(0.0, 0.0, 1.0), 1e-9).unwrap(), Vec2(0.0, 1.0));
        assert_eq!(rank_one_vector(&SymMat::<f64>::identity(2), 1e-9), Err(Error::NotRankOne(2)));
        let neg = SymMat::from_entries2(1.0, -3.0, 9.0);
        assert_eq!(rank_one_vector(&neg, 1e-9).unwrap(), Vec2(1.0, -3.0));
    }

    #[test]
    fn det2_examples() {
        assert_eq!(det2(&Vec2(1.0, 0.0), &Vec2(0.0, 1.0)), 1.0);
        assert_eq!(det2(&Vec2(1.0, 2.0), &Vec2(2.0, 4.0)), 0.0);
    }
}
