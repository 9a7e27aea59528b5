//! Brute-force checks that share no formulas with the classifiers: linear
//! and quadratic constraints come from expanding the minors of `X + tẊ`
//! directly, and every reported motion passes the exact Taylor predicate.
//!
//! Flexible families can be lower-dimensional (measure zero for Gaussian
//! draws), so sampling alternates between raw Gaussian matrices and points
//! of the subspace left after removing implicit equalities.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::factorization::{PsdFactorization, RankOneProfile, Side};
use crate::linalg::{distance_to_span, form_support, nullspace, numeric_rank, orthonormalize};
use crate::motions::{
    implicit_equalities, is_s_inf_motion, left_kernel_formula, left_kernel_minors, minor_polynomial,
    trivial_basis_general, ConeSystem, MotionMatrix, RowLabel, Variant, REDUCED_COLUMNS,
};
use crate::symcore::{index_subsets, sym_dim, SymMat};

/// Residual (after unit-Frobenius normalization) above which a motion
/// counts as nontrivial.
pub const NONTRIVIAL_RESIDUAL: f64 = 1e-6;
const SPAN_TOL: f64 = 1e-9;
const FORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVerdict {
    pub found_nontrivial: bool,
    pub motion: Option<MotionMatrix>,
    pub trials_used: usize,
    pub seed: u64,
}

/// A minor whose constant term vanishes: its linear coefficient as a row
/// over the flattened D, plus enough to evaluate its quadratic coefficient.
struct MinorRow {
    x: SymMat<f64>,
    side: Side,
    idx: Vec<usize>,
    row: DVector<f64>,
}

impl MinorRow {
    fn coeff(&self, d: &DVector<f64>, deg: usize) -> f64 {
        let xd = MotionMatrix::from_flat(d).derivative(&self.x, self.side);
        minor_polynomial(&self.x, &xd, &self.idx, deg)[deg]
    }
}

fn unit(n2: usize, r: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n2);
    e[r] = 1.0;
    e
}

fn vanishing_minors(f: &PsdFactorization<f64>, tol: f64) -> Vec<MinorRow> {
    let n = sym_dim(f.k);
    let n2 = n * n;
    let mut out = Vec::new();
    for side in [Side::A, Side::B] {
        for x in f.factors(side) {
            let scale = x.max_abs();
            let zero = SymMat::zeros(f.k);
            for idx in index_subsets(f.k) {
                let c0 = minor_polynomial(x, &zero, &idx, 0)[0];
                if c0.abs() > tol * scale.max(1.0).powi(idx.len() as i32) {
                    continue;
                }
                let mut m = MinorRow { x: x.clone(), side, idx, row: DVector::zeros(n2) };
                let row = DVector::from_fn(n2, |r, _| m.coeff(&unit(n2, r), 1));
                if row.norm() > 0.0 {
                    m.row = row;
                    out.push(m);
                }
            }
        }
    }
    out
}

fn stack(rows: &[&DVector<f64>], e: &DMatrix<f64>) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::zeros(0, e.ncols());
    }
    DMatrix::from_rows(&rows.iter().map(|r| r.transpose() * e).collect::<Vec<_>>())
}

fn restrict(e: &DMatrix<f64>, cons: &[DVector<f64>]) -> DMatrix<f64> {
    if cons.is_empty() || e.ncols() == 0 {
        return e.clone();
    }
    e * nullspace(&DMatrix::from_columns(cons).transpose(), SPAN_TOL)
}

/// Quadratic coefficient of a minor on the columns of `e`, by polarization.
fn quad_form(m: &MinorRow, e: &DMatrix<f64>) -> DMatrix<f64> {
    let k = e.ncols();
    let diag: Vec<f64> = (0..k).map(|i| m.coeff(&e.column(i).into_owned(), 2)).collect();
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            diag[i]
        } else {
            (m.coeff(&(e.column(i) + e.column(j)), 2) - diag[i] - diag[j]) / 2.0
        }
    })
}

/// Subspace in which every constraint that vanishes on all feasible D has
/// been imposed, together with a relative-interior point of the remaining
/// cone (in subspace coordinates). With `s ≥ 2`, negative semidefinite
/// second-order terms of such constraints are pinned to zero as well.
fn reduced_space(f: &PsdFactorization<f64>, s: usize, tol: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n2 = sym_dim(f.k).pow(2);
    let minors = vanishing_minors(f, tol);
    let mut e = DMatrix::<f64>::identity(n2, n2);
    for _ in 0..n2 {
        let before = e.ncols();
        if minors.is_empty() || e.ncols() == 0 {
            break;
        }
        let r = stack(&minors.iter().map(|m| &m.row).collect::<Vec<_>>(), &e);
        let (implicit, _) = implicit_equalities(&r, tol)?;
        let lin: Vec<DVector<f64>> = (0..minors.len()).filter(|&i| implicit[i]).map(|i| r.row(i).transpose()).collect();
        e = restrict(&e, &lin);
        if s >= 2 {
            let mut quad = Vec::new();
            for (m, _) in minors.iter().zip(&implicit).filter(|(_, &b)| b) {
                let q = quad_form(m, &e);
                let sc = m.x.max_abs().max(1.0).powi(m.idx.len() as i32);
                let eig = q.clone().symmetric_eigenvalues();
                // only a semidefinite-negative term forces equality
                if eig.iter().all(|&l| l <= FORM_TOL * sc) {
                    quad.extend(form_support(&q, FORM_TOL * sc));
                }
            }
            e = restrict(&e, &quad);
        }
        if e.ncols() == before {
            break;
        }
    }
    let cols = orthonormalize(&e.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), SPAN_TOL);
    let e = if cols.is_empty() { DMatrix::zeros(n2, 0) } else { DMatrix::from_columns(&cols) };
    let y = if minors.is_empty() || e.ncols() == 0 {
        DVector::zeros(e.ncols())
    } else {
        let r = stack(&minors.iter().map(|m| &m.row).collect::<Vec<_>>(), &e);
        DVector::from_vec(implicit_equalities(&r, tol)?.1)
    };
    Ok((e, y))
}

/// The span an s-infinitesimal motion must escape to count as nontrivial.
fn trivial_span(k: usize, s: usize) -> Vec<DVector<f64>> {
    if s == 1 {
        trivial_basis_general(k).iter().map(|d| d.to_flat()).collect()
    } else {
        vec![MotionMatrix::identity(sym_dim(k)).to_flat()]
    }
}

fn nontrivial(d: &DVector<f64>, span: &[DVector<f64>]) -> bool {
    let n = d.norm();
    n > 0.0 && distance_to_span(&(d / n), span) > NONTRIVIAL_RESIDUAL
}

fn accept(f: &PsdFactorization<f64>, d: &DVector<f64>, s: usize, span: &[DVector<f64>], tol: f64) -> Result<bool> {
    Ok(nontrivial(d, span) && is_s_inf_motion(f, &MotionMatrix::from_flat(d), s, tol)?)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Searches for a nontrivial s-infinitesimal motion. For s = 1 the motion
/// set is a polyhedral cone and one LP replaces sampling.
pub fn sample_motion_oracle(
    f: &PsdFactorization<f64>,
    s: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<OracleVerdict> {
    let n2 = sym_dim(f.k).pow(2);
    let span = trivial_span(f.k, s);
    let (e, y) = reduced_space(f, s, tol)?;
    let found = |d: DVector<f64>, used| {
        let n = d.norm();
        OracleVerdict {
            found_nontrivial: true,
            motion: Some(MotionMatrix::from_flat(&(d / n))),
            trials_used: used,
            seed,
        }
    };
    let interior = &e * &y;
    if s == 1 {
        let mut cands = vec![interior];
        cands.extend(e.column_iter().map(|c| c.into_owned()));
        for d in cands {
            if accept(f, &d, 1, &span, tol)? {
                return Ok(found(d, 1));
            }
        }
        return Ok(OracleVerdict { found_nontrivial: false, motion: None, trials_used: 1, seed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y_norm = y.norm();
    let reduced_useful = (0..e.ncols()).any(|i| nontrivial(&e.column(i).into_owned(), &span));
    for t in 0..trials {
        let d = match t % 3 {
            0 => gaussian(&mut rng, n2),
            1 => &e * gaussian(&mut rng, e.ncols()),
            _ => {
                let eps = 10f64.powf(-rng.gen_range(0.0..3.0));
                let g = gaussian(&mut rng, e.ncols());
                let base = if y_norm > 0.0 { &y / y_norm } else { DVector::zeros(e.ncols()) };
                &e * (base + g * eps)
            }
        };
        // points of span(I) can never be nontrivial; skip the predicate
        if t % 3 != 0 && !reduced_useful {
            continue;
        }
        if accept(f, &d, s, &span, tol)? {
            return Ok(found(d, t + 1));
        }
    }
    Ok(OracleVerdict { found_nontrivial: false, motion: None, trials_used: trials, seed })
}

/// One-sided rigidity check: true iff the sampler finds nothing.
pub fn verify_trivial_only(f: &PsdFactorization<f64>, s: usize, trials: usize, seed: u64, tol: f64) -> Result<bool> {
    Ok(!sample_motion_oracle(f, s, trials, seed, tol)?.found_nontrivial)
}

/// The subspace of D on which every linear coefficient of a minor with
/// vanishing constant term is zero (orthonormal columns over flattened D).
pub fn equality_subspace(f: &PsdFactorization<f64>, tol: f64) -> DMatrix<f64> {
    let n2 = sym_dim(f.k).pow(2);
    let rows: Vec<DVector<f64>> = vanishing_minors(f, tol).into_iter().map(|m| m.row).collect();
    restrict(&DMatrix::identity(n2, n2), &rows)
}

/// The cone matrix rebuilt from the linear coefficient of `det(vvᵀ + tẊ)`
/// probed on unit matrices.
fn expanded_cone(profile: &RankOneProfile<f64>, variant: Variant, tol: f64) -> Result<ConeSystem> {
    let skip = match variant {
        Variant::Full => None,
        Variant::OneOrth => Some(
            *profile
                .orth_pairs
                .first()
                .ok_or(Error::Precondition(vec!["one_orth variant needs an orthogonal pair".into()]))?,
        ),
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for side in [Side::A, Side::B] {
        for (pos, r) in profile.side(side).iter().enumerate() {
            let skipped = match (skip, side) {
                (Some((pa, _)), Side::A) => pos == pa,
                (Some((_, pb)), Side::B) => pos == pb,
                _ => false,
            };
            if skipped {
                continue;
            }
            let x = SymMat::outer(&r.vector);
            let full: Vec<f64> = (0..9)
                .map(|c| {
                    let xd = MotionMatrix::from_flat(&unit(9, c)).derivative(&x, side);
                    minor_polynomial(&x, &xd, &[0, 1], 1)[1]
                })
                .collect();
            rows.push(match variant {
                Variant::Full => full,
                Variant::OneOrth => REDUCED_COLUMNS.iter().map(|&c| full[c]).collect(),
            });
            labels.push(RowLabel { side, index: r.index });
        }
    }
    let ncols = rows.first().map_or(0, |r| r.len());
    let matrix = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let want = if variant == Variant::Full { 5 } else { 3 };
    if numeric_rank(&matrix, tol) < want {
        return Err(Error::RankDeficient);
    }
    Ok(ConeSystem { matrix, labels, variant, orth_pair: skip.map(|(a, b)| (profile.a[a].index, profile.b[b].index)) })
}

/// Max coordinate deviation between the closed-form left-kernel vector and
/// the one from maximal minors, both scaled so the largest-magnitude
/// formula coordinate is 1.
pub fn kernel_crosscheck(profile: &RankOneProfile<f64>, variant: Variant, tol: f64) -> Result<f64> {
    let formula = left_kernel_formula(profile, variant, tol)?;
    let c = expanded_cone(profile, variant, tol)?;
    let minors = left_kernel_minors(&c, tol)?;
    if minors.rank_deficient {
        return Err(Error::RankDeficient);
    }
    let m = (0..formula.len())
        .max_by(|&i, &j| formula[i].abs().partial_cmp(&formula[j].abs()).unwrap())
        .ok_or(Error::Empty)?;
    if formula[m] == 0.0 || minors.vector[m] == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(formula
        .iter()
        .zip(&minors.vector)
        .map(|(x, y)| (x / formula[m] - y / minors.vector[m]).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motions::k_trivial_witness;
    use crate::symcore::Vec2;

    fn fac(a: &[(f64, f64)], b: &[(f64, f64)]) -> PsdFactorization<f64> {
        let a: Vec<_> = a.iter().map(|&(x, y)| Vec2(x, y)).collect();
        let b: Vec<_> = b.iter().map(|&(x, y)| Vec2(x, y)).collect();
        PsdFactorization::from_vectors(&a, &b).unwrap()
    }

    #[test]
    fn flexible_example_found_at_s1() {
        let f = fac(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)], &[(1.0, 5.0), (1.0, 6.0), (1.0, 7.0)]);
        assert!(sample_motion_oracle(&f, 1, 1, 0, 1e-9).unwrap().found_nontrivial);
    }

    #[test]
    fn rigid_example_nothing_at_s2() {
        let f = fac(&[(1.0, 0.0), (0.5, -0.5), (0.0, 1.0)], &[(0.5, 1.5), (0.5, -0.5), (1.0, 0.25)]);
        assert!(verify_trivial_only(&f, 2, 300, 1, 1e-9).unwrap());
    }

    #[test]
    fn witness_k2_trivial_only() {
        assert!(verify_trivial_only(&k_trivial_witness(2), 2, 300, 3, 1e-9).unwrap());
    }
}
