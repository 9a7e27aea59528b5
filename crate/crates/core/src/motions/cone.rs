//! The α-rows of rank-one factors, the matrices C and C̄, and their kernels.
//!
//! For a rank-one factor `det(A + tȦ) = t·α(D) + t²·β(D)`; the cone of
//! 1-infinitesimal motions is `{D : C·vec9(D) ≥ 0}`.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::factorization::{RankOneProfile, Side};
use crate::linalg::numeric_rank;
use crate::symcore::{det2, SymMat, Vec2};

use super::MotionMatrix;

/// Columns (D11, D21, D22, D23, D31, D33) kept once D12 = D13 = D32 = 0.
pub const REDUCED_COLUMNS: [usize; 6] = [0, 3, 4, 5, 6, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// Frame with an orthogonal pair a = (λ,0), b = (0,μ); their rows are
    /// dropped and only [`REDUCED_COLUMNS`] kept.
    OneOrth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowLabel {
    pub side: Side,
    /// 0-based index of the factor in the factorization.
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSystem {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<RowLabel>,
    pub variant: Variant,
    /// The orthogonal pair fixing the frame (source indices), one_orth only.
    pub orth_pair: Option<(usize, usize)>,
}

impl ConeSystem {
    pub fn rows_on(&self, side: Side) -> usize {
        self.labels.iter().filter(|l| l.side == side).count()
    }

    pub fn rank(&self, tol: f64) -> usize {
        numeric_rank(&self.matrix, tol)
    }
}

pub fn alpha_row(v: &Vec2<f64>, side: Side) -> [f64; 9] {
    let (x, y) = (v.0, v.1);
    let (x2, y2) = (x * x, y * y);
    match side {
        Side::A => [
            x2 * y2,
            x2 * x2,
            -SQRT_2 * x2 * x * y,
            y2 * y2,
            x2 * y2,
            -SQRT_2 * x * y2 * y,
            SQRT_2 * x * y2 * y,
            SQRT_2 * x2 * x * y,
            -2.0 * x2 * y2,
        ],
        Side::B => [
            -x2 * y2,
            -y2 * y2,
            -SQRT_2 * x * y2 * y,
            -x2 * x2,
            -x2 * y2,
            -SQRT_2 * x2 * x * y,
            SQRT_2 * x2 * x * y,
            SQRT_2 * x * y2 * y,
            2.0 * x2 * y2,
        ],
    }
}

/// `det(Ȧ)` (side A) or `det(Ḃ)` (side B) for the factor `v vᵀ`.
pub fn beta_quadratic(v: &Vec2<f64>, side: Side, d: &MotionMatrix) -> f64 {
    let dx = d.derivative(&SymMat::outer(v), side);
    dx.get(0, 0) * dx.get(1, 1) - dx.get(0, 1) * dx.get(0, 1)
}

fn frame_pair(profile: &RankOneProfile<f64>, tol: f64) -> Result<(usize, usize)> {
    let &(pa, pb) = profile
        .orth_pairs
        .first()
        .ok_or_else(|| Error::Precondition(vec!["one_orth variant needs an orthogonal pair".into()]))?;
    let (a, b) = (&profile.a[pa].vector, &profile.b[pb].vector);
    if a.1.abs() > tol * a.norm_f64() || b.0.abs() > tol * b.norm_f64() {
        return Err(Error::Precondition(vec![format!(
            "profile not normalized: need a_{} = (λ,0) and b_{} = (0,μ)",
            profile.a[pa].index + 1,
            profile.b[pb].index + 1
        )]));
    }
    Ok((pa, pb))
}

pub fn build_cone_system(profile: &RankOneProfile<f64>, variant: Variant, tol: f64) -> Result<ConeSystem> {
    let skip = match variant {
        Variant::Full => None,
        Variant::OneOrth => Some(frame_pair(profile, tol)?),
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
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
            let full = alpha_row(&r.vector, side);
            rows.push(match variant {
                Variant::Full => full.to_vec(),
                Variant::OneOrth => REDUCED_COLUMNS.iter().map(|&c| full[c]).collect(),
            });
            labels.push(RowLabel { side, index: r.index });
        }
    }
    let ncols = match variant {
        Variant::Full => 9,
        Variant::OneOrth => 6,
    };
    let matrix = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let orth_pair = skip.map(|(pa, pb)| (profile.a[pa].index, profile.b[pb].index));
    Ok(ConeSystem { matrix, labels, variant, orth_pair })
}

/// v1..v4 spanning L ⊆ ker C, or w1..w3 spanning L̄ ⊆ ker C̄.
pub fn right_kernel_structured(variant: Variant) -> Vec<Vec<f64>> {
    match variant {
        Variant::Full => vec![
            vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        ],
        Variant::OneOrth => vec![
            vec![2.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 2.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        ],
    }
}

/// Embeds a reduced 6-vector as a motion with D12 = D13 = D32 = 0.
pub fn lift_reduced(d6: &[f64]) -> MotionMatrix {
    let mut v = vec![0.0; 9];
    for (c, x) in REDUCED_COLUMNS.iter().zip(d6) {
        v[*c] = *x;
    }
    MotionMatrix::from_row_major(3, v).expect("nine entries")
}

/// Closed-form left-kernel generator: entry k is a signed product of all
/// pairwise determinants and cross inner products not involving the k-th
/// vector. One_orth uses a = (1,0), b = (0,1) for the frame pair, drops
/// ⟨a1,b1⟩ and returns only the entries of the remaining rows.
pub fn left_kernel_formula(profile: &RankOneProfile<f64>, variant: Variant, tol: f64) -> Result<Vec<f64>> {
    let n = profile.p_bar() + profile.q_bar();
    if n != 6 {
        return Err(Error::Precondition(vec![format!("closed form needs p̄ + q̄ = 6, found {n}")]));
    }
    let (a, b, skip_first): (Vec<Vec2<f64>>, Vec<Vec2<f64>>, bool) = match variant {
        Variant::Full => (profile.a_vectors(), profile.b_vectors(), false),
        Variant::OneOrth => {
            let (pa, pb) = frame_pair(profile, tol)?;
            let reorder = |vs: Vec<Vec2<f64>>, first: usize, unit: Vec2<f64>| {
                let mut out = vec![unit];
                out.extend(vs.into_iter().enumerate().filter(|&(i, _)| i != first).map(|(_, v)| v));
                out
            };
            (reorder(profile.a_vectors(), pa, Vec2(1.0, 0.0)), reorder(profile.b_vectors(), pb, Vec2(0.0, 1.0)), true)
        }
    };
    let p = a.len();
    let mut out = Vec::new();
    for k in 0..n {
        if skip_first && (k == 0 || k == p) {
            continue;
        }
        let k1 = k + 1;
        let mut val = if (k1 + usize::from(k1 > p)) % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..p {
            for j in i + 1..p {
                if k != i && k != j {
                    val *= det2(&a[i], &a[j]);
                }
            }
        }
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if k != p + i && k != p + j {
                    val *= det2(&b[i], &b[j]);
                }
            }
        }
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if skip_first && i == 0 && j == 0 {
                    continue;
                }
                if k != i && k != p + j {
                    val *= ai.dot(bj);
                }
            }
        }
        out.push(val);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinorKernel {
    pub vector: Vec<f64>,
    pub rank_deficient: bool,
}

fn minors_with_alternating_signs(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * m.clone().remove_row(i).determinant()
        })
        .collect()
}

/// Left-kernel vector from maximal minors: for C, the 5×5 minors of columns
/// (1,2,3,4,6) with signs `(−1)^p̄ (C'1, −C'2, …)`; for C̄, the 3×3 minors of
/// columns (1,2,5). A rank-deficient C yields the zero vector, flagged.
pub fn left_kernel_minors(c: &ConeSystem, tol: f64) -> Result<MinorKernel> {
    let (rows, cols, full_rank): (usize, &[usize], usize) = match c.variant {
        Variant::Full => (6, &[0, 1, 2, 3, 5], 5),
        Variant::OneOrth => (4, &[0, 1, 4], 3),
    };
    if c.matrix.nrows() != rows {
        return Err(Error::DimensionMismatch { expected: rows, found: c.matrix.nrows() });
    }
    if c.rank(tol) < full_rank {
        return Ok(MinorKernel { vector: vec![0.0; rows], rank_deficient: true });
    }
    let sub = c.matrix.select_columns(cols);
    let mut v = minors_with_alternating_signs(&sub);
    if c.variant == Variant::Full && c.rows_on(Side::A) % 2 == 1 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(MinorKernel { vector: v, rank_deficient: false })
}
