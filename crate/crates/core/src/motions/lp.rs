//! Small linear programs over cones `{x : R x ≥ 0}`.
//!
//! Rows are normalized to unit length first (the cone does not change), and
//! zero rows are dropped since they constrain nothing.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::cone::ConeSystem;

// rows shorter than this (relative to the longest) are treated as zero
const ZERO_ROW: f64 = 1e-12;
// the LP only certifies; every positive answer is re-checked directly
const CHECK_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct LpCertificate {
    /// Optimal value of `max t s.t. R̂x ≥ t·1, t ≤ 1` over the nonzero rows.
    pub t: f64,
    pub point: Vec<f64>,
}

fn normalized_rows(rows: &DMatrix<f64>) -> (Vec<usize>, DMatrix<f64>) {
    let norms: Vec<f64> = (0..rows.nrows()).map(|i| rows.row(i).norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..rows.nrows()).filter(|&i| norms[i] > ZERO_ROW * top.max(f64::MIN_POSITIVE)).collect();
    let m = DMatrix::from_fn(keep.len(), rows.ncols(), |i, j| rows[(keep[i], j)] / norms[keep[i]]);
    (keep, m)
}

fn solve(p: &Problem) -> Result<microlp::Solution> {
    match p.solve().map_err(|e| Error::Lp(e.to_string()))? {
        SolveOutcome::Solution(s) => Ok(s),
        other => Err(Error::Lp(format!("{other:?}"))),
    }
}

fn free_vars(p: &mut Problem, n: usize) -> Vec<Variable> {
    (0..n).map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect()
}

/// Maximizes the uniform slack t; the cone has interior iff t > 0.
pub fn strict_feasibility(rows: &DMatrix<f64>) -> Result<LpCertificate> {
    let n = rows.ncols();
    let (_, r) = normalized_rows(rows);
    if r.nrows() == 0 {
        return Ok(LpCertificate { t: 1.0, point: vec![0.0; n] });
    }
    let mut p = Problem::new(OptimizationDirection::Maximize);
    // a box keeps the simplex away from huge coordinates
    let x: Vec<Variable> = (0..n).map(|_| p.add_var(0.0, (-1e3, 1e3))).collect();
    let t = p.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for i in 0..r.nrows() {
        let mut terms: Vec<(Variable, f64)> = (0..n).map(|j| (x[j], r[(i, j)])).collect();
        terms.push((t, -1.0));
        p.add_constraint(&terms[..], ComparisonOp::Ge, 0.0);
    }
    let s = solve(&p)?;
    Ok(LpCertificate { t: s[t], point: x.iter().map(|&v| s[v]).collect() })
}

fn strictly_inside(rows: &DMatrix<f64>, x: &[f64]) -> bool {
    let (_, r) = normalized_rows(rows);
    let xv = DVector::from_column_slice(x);
    let scale = xv.norm().max(1.0);
    (&r * &xv).iter().all(|&v| v > CHECK_MARGIN * scale)
}

/// Full-dimensionality of `{D : C·D ≥ 0}`: the LP optimum must exceed `tol`
/// and the returned point must be strictly inside when checked directly.
pub fn cone_full_dimensional(c: &ConeSystem, tol: f64) -> Result<bool> {
    let cert = strict_feasibility(&c.matrix)?;
    Ok(cert.t > tol && strictly_inside(&c.matrix, &cert.point))
}

/// A point with `C·D ≥ 1` on every nonzero row, or None if the cone is not
/// full-dimensional.
pub fn cone_interior_point(c: &ConeSystem, tol: f64) -> Result<Option<Vec<f64>>> {
    interior_point(&c.matrix, tol)
}

pub(crate) fn interior_point(rows: &DMatrix<f64>, tol: f64) -> Result<Option<Vec<f64>>> {
    let cert = strict_feasibility(rows)?;
    if !(cert.t > tol && strictly_inside(rows, &cert.point)) {
        return Ok(None);
    }
    let (keep, _) = normalized_rows(rows);
    let x = DVector::from_column_slice(&cert.point);
    if keep.is_empty() {
        return Ok(Some(cert.point));
    }
    let vals = rows * &x;
    let min = keep.iter().map(|&i| vals[i]).fold(f64::INFINITY, f64::min);
    // tiny overshoot so rounding cannot push a row below 1
    let scaled: Vec<f64> = x.iter().map(|v| v / min * (1.0 + 1e-9)).collect();
    Ok(Some(scaled))
}

/// Rows that vanish on the whole cone `{x : R x ≥ 0}` (implicit equalities),
/// plus a point of the cone on which every other row is positive.
///
/// One LP: maximize Σ sᵢ subject to R̂ᵢ·x ≥ sᵢ, 0 ≤ sᵢ ≤ 1. If a row can be
/// positive anywhere, adding a small multiple of that witness increases its
/// slack without hurting the others, so at the optimum exactly the implicit
/// equalities have sᵢ = 0.
pub fn implicit_equalities(rows: &DMatrix<f64>, tol: f64) -> Result<(Vec<bool>, Vec<f64>)> {
    let n = rows.ncols();
    let (keep, r) = normalized_rows(rows);
    let mut implicit = vec![true; rows.nrows()];
    if r.nrows() == 0 || n == 0 {
        return Ok((implicit, vec![0.0; n]));
    }
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let x = free_vars(&mut p, n);
    let s: Vec<Variable> = (0..r.nrows()).map(|_| p.add_var(1.0, (0.0, 1.0))).collect();
    for i in 0..r.nrows() {
        let mut terms: Vec<(Variable, f64)> = (0..n).map(|j| (x[j], r[(i, j)])).collect();
        terms.push((s[i], -1.0));
        p.add_constraint(&terms[..], ComparisonOp::Ge, 0.0);
    }
    let sol = solve(&p)?;
    let point: Vec<f64> = x.iter().map(|&v| sol[v]).collect();
    let xv = DVector::from_column_slice(&point);
    let scale = xv.norm().max(1.0);
    let thresh = tol.max(1e-9) * scale;
    for (ri, &orig) in keep.iter().enumerate() {
        let val = (r.row(ri) * &xv)[0];
        implicit[orig] = !(sol[s[ri]] > tol.max(1e-9) && val > thresh);
    }
    Ok((implicit, point))
}
