//! Floating-point helpers on nalgebra matrices: ranks, null spaces and
//! kernels of positive semidefinite forms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Rank: singular values above `tol · σ_max` (and above `tol` absolutely).
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top <= tol {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * top).count()
}

/// Orthonormal basis (as columns) of `{x : m x = 0}`.
pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad to at least n rows so the SVD returns a full V
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> =
        (0..n).filter(|&i| top <= tol || svd.singular_values[i] <= tol * top).map(|i| vt.row(i).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Directions along which the symmetric form `q` is not negligible; the
/// kernel of `q` is their orthogonal complement when `q` is semidefinite.
pub fn form_support(q: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    if q.nrows() == 0 {
        return vec![];
    }
    let eig = SymmetricEigen::new(q.clone());
    (0..q.nrows())
        .filter(|&i| eig.eigenvalues[i].abs() > tol)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// Orthonormalize columns (modified Gram–Schmidt), dropping dependent ones.
pub fn orthonormalize(cols: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for u in &out {
            let p = u.dot(&v);
            v -= u * p;
        }
        let n = v.norm();
        if n > tol * c.norm().max(1.0) {
            out.push(v / n);
        }
    }
    out
}

/// Distance of `x` from the span of `basis` (columns need not be orthonormal).
pub fn distance_to_span(x: &DVector<f64>, basis: &[DVector<f64>]) -> f64 {
    let q = orthonormalize(basis, 1e-12);
    let mut r = x.clone();
    for u in &q {
        let p = u.dot(&r);
        r -= u * p;
    }
    r.norm()
}
