//! 2-infinitesimal motion spaces of rank-one profiles (k = 2).
//!
//! For a rank-one factor the conditions are `α(D) ≥ 0`, and `β(D) ≥ 0`
//! whenever `α(D) = 0`. Since β ≤ 0 on `{α = 0}`, a row that vanishes on
//! every feasible D forces β = 0 there, i.e. D lies in the kernel of the
//! (semidefinite) form β. Alternating the two reductions until nothing
//! changes leaves a subspace E on which the motions are exactly the cone cut
//! out by the remaining strict rows; the factorization is 2-infinitesimally
//! rigid iff E = span(I).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::factorization::{RankOneFactor, RankOneProfile, Side};
use crate::linalg::{form_support, nullspace, orthonormalize};
use crate::symcore::{det2, Vec2};

use super::cone::{alpha_row, beta_quadratic};
use super::lp::implicit_equalities;
use super::{unconjugate, MotionMatrix};

const MAX_ROUNDS: usize = 20;
// relative threshold for β eigenvalues, scaled by |v|⁴
const FORM_TOL: f64 = 1e-8;
const SPAN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotionKind {
    /// Only D = dI.
    TrivialOnly,
    /// A linear space of motions beyond dI (no strict inequality survives).
    AffineFlex,
    /// A full cone inside the reduced space, cut out by strict rows.
    ConeFlex,
}

impl std::fmt::Display for MotionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MotionKind::TrivialOnly => "trivial_only",
            MotionKind::AffineFlex => "affine_flex",
            MotionKind::ConeFlex => "cone_flex",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotionSpace {
    /// Orthonormal (in the vec9 sense) basis of the reduced space; always contains dI.
    pub basis: Vec<MotionMatrix>,
    pub kind: MotionKind,
    /// A nontrivial 2-infinitesimal motion, orthogonal to I, when flexible.
    pub witness: Option<MotionMatrix>,
}

impl MotionSpace {
    pub fn is_trivial_only(&self) -> bool {
        self.kind == MotionKind::TrivialOnly
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

struct Row {
    v: Vec2<f64>,
    side: Side,
    alpha: DVector<f64>,
}

fn rows_of(profile: &RankOneProfile<f64>) -> Vec<Row> {
    let mk = |r: &RankOneFactor<f64>, side| Row {
        v: r.vector.clone(),
        side,
        alpha: DVector::from_column_slice(&alpha_row(&r.vector, side)),
    };
    profile.a.iter().map(|r| mk(r, Side::A)).chain(profile.b.iter().map(|r| mk(r, Side::B))).collect()
}

fn motion(x: &DVector<f64>) -> MotionMatrix {
    MotionMatrix::from_flat(x)
}

/// Gram matrix of β restricted to the columns of `e`, by polarization.
fn beta_form(row: &Row, e: &DMatrix<f64>) -> DMatrix<f64> {
    let m = e.ncols();
    let b = |x: DVector<f64>| beta_quadratic(&row.v, row.side, &motion(&x));
    let diag: Vec<f64> = (0..m).map(|k| b(e.column(k).into_owned())).collect();
    DMatrix::from_fn(
        m,
        m,
        |k, l| {
            if k == l {
                diag[k]
            } else {
                (b(e.column(k) + e.column(l)) - diag[k] - diag[l]) / 2.0
            }
        },
    )
}

fn restrict(e: &DMatrix<f64>, constraints: &[DVector<f64>]) -> DMatrix<f64> {
    if constraints.is_empty() {
        return e.clone();
    }
    let c = DMatrix::from_columns(constraints).transpose();
    let k = nullspace(&c, SPAN_TOL);
    e * k
}

/// The reduction on a profile in whatever frame it is given.
fn reduce(profile: &RankOneProfile<f64>, tol: f64) -> Result<MotionSpace> {
    let rows = rows_of(profile);
    let mut e = DMatrix::<f64>::identity(9, 9);
    for _ in 0..MAX_ROUNDS {
        let before = e.ncols();
        if rows.is_empty() {
            break;
        }
        let r = DMatrix::from_rows(&rows.iter().map(|x| x.alpha.transpose() * &e).collect::<Vec<_>>());
        let (implicit, _) = implicit_equalities(&r, tol)?;
        // first pin the implicit rows, then kill the β directions on what is left
        let lin: Vec<DVector<f64>> = (0..rows.len()).filter(|&i| implicit[i]).map(|i| r.row(i).transpose()).collect();
        e = restrict(&e, &lin);
        let mut quad: Vec<DVector<f64>> = Vec::new();
        for (i, row) in rows.iter().enumerate().filter(|(i, _)| implicit[*i]) {
            let _ = i;
            let q = beta_form(row, &e);
            let n2 = row.v.dot(&row.v);
            quad.extend(form_support(&q, FORM_TOL * n2 * n2));
        }
        e = restrict(&e, &quad);
        if e.ncols() == before {
            break;
        }
    }
    let basis_cols = orthonormalize(&e.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), SPAN_TOL);
    let e = if basis_cols.is_empty() { DMatrix::zeros(9, 0) } else { DMatrix::from_columns(&basis_cols) };
    let eye = DVector::from_column_slice(MotionMatrix::identity(3).vec9()) / 3f64.sqrt();
    if e.ncols() <= 1 {
        return Ok(MotionSpace { basis: vec![motion(&eye)], kind: MotionKind::TrivialOnly, witness: None });
    }
    let r = DMatrix::from_rows(&rows.iter().map(|x| x.alpha.transpose() * &e).collect::<Vec<_>>());
    let (implicit, y) = if rows.is_empty() { (vec![], vec![0.0; e.ncols()]) } else { implicit_equalities(&r, tol)? };
    let strict = implicit.iter().any(|&b| !b);
    let drop_i = |x: DVector<f64>| -> DVector<f64> {
        let c = x.dot(&eye);
        x - &eye * c
    };
    let (kind, witness) = if strict {
        (MotionKind::ConeFlex, drop_i(&e * DVector::from_vec(y)))
    } else {
        let w = e
            .column_iter()
            .map(|c| drop_i(c.into_owned()))
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .expect("dim ≥ 2");
        (MotionKind::AffineFlex, w)
    };
    let n = witness.norm();
    let witness = (n > SPAN_TOL).then(|| motion(&(witness / n)));
    let basis = e.column_iter().map(|c| motion(&c.into_owned())).collect();
    Ok(MotionSpace { basis, kind, witness })
}

/// `a ↦ Sᵀa`, `b ↦ S⁻¹b`: the rank-one view of `gl_act`.
fn transform(profile: &RankOneProfile<f64>, s: &[Vec<f64>]) -> Result<RankOneProfile<f64>> {
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if det == 0.0 {
        return Err(Error::Singular);
    }
    let st = |v: &Vec2<f64>| Vec2(s[0][0] * v.0 + s[1][0] * v.1, s[0][1] * v.0 + s[1][1] * v.1);
    let si = |v: &Vec2<f64>| Vec2((s[1][1] * v.0 - s[0][1] * v.1) / det, (-s[1][0] * v.0 + s[0][0] * v.1) / det);
    let mut out = profile.clone();
    out.a.iter_mut().for_each(|r| r.vector = st(&r.vector));
    out.b.iter_mut().for_each(|r| r.vector = si(&r.vector));
    Ok(out)
}

/// Rotation scaled so that `Sᵀ a = (1, 0)`.
fn frame_for(a: &Vec2<f64>) -> Vec<Vec<f64>> {
    let n2 = a.dot(a);
    let (c, s) = (a.0 / n2, a.1 / n2);
    vec![vec![c, -s], vec![s, c]]
}

fn solve_in_frame(profile: &RankOneProfile<f64>, s: Vec<Vec<f64>>, tol: f64) -> Result<MotionSpace> {
    let local = reduce(&transform(profile, &s)?, tol)?;
    let back = |d: &MotionMatrix| unconjugate(d, &s);
    let mapped: Vec<DVector<f64>> = local.basis.iter().map(|d| back(d).map(|m| m.to_flat())).collect::<Result<_>>()?;
    let basis = orthonormalize(&mapped, SPAN_TOL).iter().map(motion).collect();
    let witness = match &local.witness {
        Some(w) => {
            let x = back(w)?;
            let f = x.frobenius();
            Some(x.scaled(1.0 / f))
        }
        None => None,
    };
    Ok(MotionSpace { basis, kind: local.kind, witness })
}

fn check_nondegenerate(profile: &RankOneProfile<f64>, tol: f64) -> Result<()> {
    let mut bad = Vec::new();
    for (side, vs) in [(Side::A, &profile.a), (Side::B, &profile.b)] {
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let (u, v) = (&vs[i].vector, &vs[j].vector);
                if det2(u, v).abs() <= tol * u.norm_f64() * v.norm_f64() {
                    let name = side.to_string().to_lowercase();
                    bad.push(format!("det({name}{}, {name}{}) = 0", vs[i].index + 1, vs[j].index + 1));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(bad))
    }
}

/// No orthogonal pairs; the frame sends the first rank-one `a` to (1, 0).
pub fn solve_two_inf_no_orth(profile: &RankOneProfile<f64>, tol: f64) -> Result<MotionSpace> {
    if !profile.orth_pairs.is_empty() {
        return Err(Error::Precondition(vec![format!(
            "expected no orthogonal pairs, found {}",
            profile.orth_pairs.len()
        )]));
    }
    check_nondegenerate(profile, tol)?;
    let s = match profile.a.first() {
        Some(r) => frame_for(&r.vector),
        None => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    solve_in_frame(profile, s, tol)
}

fn solve_orth(profile: &RankOneProfile<f64>, tol: f64) -> Result<MotionSpace> {
    check_nondegenerate(profile, tol)?;
    let (pa, _) = profile.orth_pairs[0];
    solve_in_frame(profile, frame_for(&profile.a[pa].vector), tol)
}

/// Exactly one orthogonal pair; the frame normalizes it to a = (1,0), b ∝ (0,1).
pub fn solve_two_inf_one_orth(profile: &RankOneProfile<f64>, tol: f64) -> Result<MotionSpace> {
    if profile.orth_pairs.len() != 1 {
        return Err(Error::Precondition(vec![format!(
            "expected exactly one orthogonal pair, found {}",
            profile.orth_pairs.len()
        )]));
    }
    solve_orth(profile, tol)
}

/// At least two orthogonal pairs; framed on the first one.
pub fn solve_two_inf_two_orth(profile: &RankOneProfile<f64>, tol: f64) -> Result<MotionSpace> {
    if profile.orth_pairs.len() < 2 {
        return Err(Error::Precondition(vec![format!(
            "expected at least two orthogonal pairs, found {}",
            profile.orth_pairs.len()
        )]));
    }
    solve_orth(profile, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(a: &[(f64, f64)], b: &[(f64, f64)]) -> RankOneProfile<f64> {
        let a: Vec<_> = a.iter().map(|&(x, y)| Vec2(x, y)).collect();
        let b: Vec<_> = b.iter().map(|&(x, y)| Vec2(x, y)).collect();
        RankOneProfile::from_vectors(&a, &b, 1e-9)
    }

    #[test]
    fn rigid_example_is_trivial_only() {
        let p = prof(&[(1.0, 0.0), (0.5, -0.5), (0.0, 1.0)], &[(0.5, 1.5), (0.5, -0.5), (1.0, 0.25)]);
        let m = solve_two_inf_no_orth(&p, 1e-9).unwrap();
        assert_eq!(m.kind, MotionKind::TrivialOnly);
    }

    #[test]
    fn flexible_example_has_cone() {
        let p = prof(&[(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)], &[(1.0, 5.0), (1.0, 6.0), (1.0, 7.0)]);
        let m = solve_two_inf_no_orth(&p, 1e-9).unwrap();
        assert_eq!(m.kind, MotionKind::ConeFlex);
        assert!(m.witness.is_some());
    }

    #[test]
    fn derangement_is_trivial_only() {
        let p = prof(&[(1.0, 0.0), (0.0, 1.0), (1.0, -1.0)], &[(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        let m = solve_two_inf_two_orth(&p, 1e-9).unwrap();
        assert_eq!(m.kind, MotionKind::TrivialOnly);
    }

    #[test]
    fn identity_always_in_space() {
        let p = prof(&[(1.0, 0.0), (0.0, 1.0)], &[(0.0, 1.0), (1.0, 0.0)]);
        let m = solve_two_inf_two_orth(&p, 1e-9).unwrap();
        assert!(m.dim() >= 3);
        let eye = MotionMatrix::identity(3).to_flat();
        let cols: Vec<_> = m.basis.iter().map(|d| d.to_flat()).collect();
        assert!(crate::linalg::distance_to_span(&eye, &cols) < 1e-9);
    }
}
