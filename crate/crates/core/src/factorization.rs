//! Size-k psd factorizations `M_ij = ⟨A_i, B_j⟩`: validation, the GL(2)
//! action, orthogonal normalization, rank-one profiles and generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::{det2, inner, psd_status, rank_one_factor, SymMat, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdFactorization<T> {
    pub k: usize,
    pub a: Vec<SymMat<T>>,
    pub b: Vec<SymMat<T>>,
    /// Target matrix as supplied; [`PsdFactorization::reconstruct`] is the
    /// ground truth and [`validate`] compares the two.
    pub m: Option<Vec<Vec<T>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Factors failing the psd test, as (side, 0-based index).
    pub psd_failures: Vec<(Side, usize)>,
    /// Entries where the stored M disagrees with the reconstruction.
    pub mismatches: Vec<(usize, usize)>,
    pub max_mismatch: f64,
    pub shape_ok: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.shape_ok && self.psd_failures.is_empty() && self.mismatches.is_empty()
    }
}

/// A rank-one factor `scale · v vᵀ` with its 0-based position in the
/// factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneFactor<T> {
    pub index: usize,
    pub vector: Vec2<T>,
    pub scale: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneratePair {
    pub side: Side,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOneProfile<T> {
    pub a: Vec<RankOneFactor<T>>,
    pub b: Vec<RankOneFactor<T>>,
    /// Orthogonal pairs as positions into `a` and `b`.
    pub orth_pairs: Vec<(usize, usize)>,
    /// Parallel pairs, by source index.
    pub degenerate_pairs: Vec<DegeneratePair>,
}

impl<T: Scalar> PsdFactorization<T> {
    pub fn new(a: Vec<SymMat<T>>, b: Vec<SymMat<T>>) -> Result<Self> {
        let k = a.first().or(b.first()).map(|x| x.k()).ok_or(Error::Empty)?;
        for x in a.iter().chain(b.iter()) {
            if x.k() != k {
                return Err(Error::DimensionMismatch { expected: k, found: x.k() });
            }
        }
        Ok(PsdFactorization { k, a, b, m: None })
    }

    /// Builds the rank-one factorization `a_i a_iᵀ`, `b_j b_jᵀ`.
    pub fn from_vectors(a: &[Vec2<T>], b: &[Vec2<T>]) -> Result<Self> {
        Self::new(a.iter().map(SymMat::outer).collect(), b.iter().map(SymMat::outer).collect())
    }

    pub fn with_reconstructed_m(mut self) -> Result<Self> {
        self.m = Some(self.reconstruct()?);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn factors(&self, side: Side) -> &[SymMat<T>] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// `M_ij = ⟨A_i, B_j⟩`.
    pub fn reconstruct(&self) -> Result<Vec<Vec<T>>> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::Empty);
        }
        self.a.iter().map(|x| self.b.iter().map(|y| inner(x, y)).collect()).collect()
    }

    /// Target matrix: the stored one if present, else the reconstruction.
    pub fn target(&self) -> Result<Vec<Vec<T>>> {
        match &self.m {
            Some(m) => Ok(m.clone()),
            None => self.reconstruct(),
        }
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U + Copy>(&self, f: F) -> PsdFactorization<U> {
        PsdFactorization {
            k: self.k,
            a: self.a.iter().map(|x| x.map(f)).collect(),
            b: self.b.iter().map(|x| x.map(f)).collect(),
            m: self.m.as_ref().map(|m| m.iter().map(|r| r.iter().map(f).collect()).collect()),
        }
    }

    pub fn to_f64(&self) -> PsdFactorization<f64> {
        self.map(|x| x.as_f64())
    }
}

/// Scale of a matrix for relative comparisons.
fn matrix_scale<T: Scalar>(m: &[Vec<T>]) -> f64 {
    m.iter().flatten().map(|x| x.abs().as_f64()).fold(1.0, f64::max)
}

pub fn validate<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> ValidationReport {
    let mut psd_failures = Vec::new();
    for side in [Side::A, Side::B] {
        for (i, x) in f.factors(side).iter().enumerate() {
            if !psd_status(x, tol).psd {
                psd_failures.push((side, i));
            }
        }
    }
    let mut report = ValidationReport { psd_failures, mismatches: vec![], max_mismatch: 0.0, shape_ok: true };
    let Ok(rec) = f.reconstruct() else {
        report.shape_ok = false;
        return report;
    };
    if let Some(m) = &f.m {
        if m.len() != f.p() || m.iter().any(|r| r.len() != f.q()) {
            report.shape_ok = false;
            return report;
        }
        let scale = matrix_scale(m);
        for i in 0..f.p() {
            for j in 0..f.q() {
                let d = rec[i][j].clone() - m[i][j].clone();
                report.max_mismatch = report.max_mismatch.max(d.abs().as_f64());
                if !d.negligible(tol * scale) {
                    report.mismatches.push((i, j));
                }
            }
        }
    }
    report
}

pub fn reconstruct<T: Scalar>(f: &PsdFactorization<T>) -> Result<Vec<Vec<T>>> {
    f.reconstruct()
}

/// Numeric rank of a matrix given by rows.
pub fn matrix_rank<T: Scalar>(m: &[Vec<T>], tol: f64) -> usize {
    dense::rank(m, tol)
}

/// Inverse of a 2×2 matrix given by rows.
pub fn inverse2<T: Scalar>(s: &[Vec<T>], tol: f64) -> Result<Vec<Vec<T>>> {
    if s.len() != 2 || s.iter().any(|r| r.len() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: s.len() });
    }
    let d = dense::det(s);
    let scale = matrix_scale(s);
    if d.negligible(tol * scale * scale) {
        return Err(Error::Singular);
    }
    Ok(vec![
        vec![s[1][1].clone() / d.clone(), -s[0][1].clone() / d.clone()],
        vec![-s[1][0].clone() / d.clone(), s[0][0].clone() / d],
    ])
}

fn transpose<T: Clone>(s: &[Vec<T>]) -> Vec<Vec<T>> {
    (0..s[0].len()).map(|j| s.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `A ↦ Sᵀ A S`, `B ↦ S⁻¹ B S⁻ᵀ`; preserves every inner product.
pub fn gl_act<T: Scalar>(f: &PsdFactorization<T>, s: &[Vec<T>], tol: f64) -> Result<PsdFactorization<T>> {
    if f.k != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: f.k });
    }
    let s_inv_t = transpose(&inverse2(s, tol)?);
    Ok(PsdFactorization {
        k: 2,
        a: f.a.iter().map(|x| x.congruence(s)).collect(),
        b: f.b.iter().map(|x| x.congruence(&s_inv_t)).collect(),
        m: f.m.clone(),
    })
}

/// Maps the orthogonal pair (A^(i), B^(j)) to a = (λ,0), b = (0,μ) with
/// λ, μ > 0 by a rotation S. Exact scalars without a rational norm use the
/// scaled rotation |a|·S instead, which has the same effect on directions.
pub fn normalize_orthogonal_pair<T: Scalar>(
    f: &PsdFactorization<T>,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<(PsdFactorization<T>, Vec<Vec<T>>)> {
    let err = || Error::NotOrthogonalPair(i + 1, j + 1);
    let (ai, bj) = (f.a.get(i).ok_or_else(err)?, f.b.get(j).ok_or_else(err)?);
    let (a, _) = rank_one_factor(ai, tol).map_err(|_| err())?;
    let (b, _) = rank_one_factor(bj, tol).map_err(|_| err())?;
    if !a.dot(&b).negligible(tol * a.norm_f64() * b.norm_f64()) {
        return Err(err());
    }
    let n2 = a.dot(&a);
    let (c, s) = match n2.sqrt_checked() {
        Some(n) => (a.0.clone() / n.clone(), a.1.clone() / n),
        None => (a.0.clone(), a.1.clone()),
    };
    // S = [[c, -s], [s, c]], so Sᵀ a = (|a|, 0)
    let rot = vec![vec![c.clone(), -s.clone()], vec![s, c]];
    // b ↦ S⁻¹ b ∝ (0, det(a, b)); the sign of b is invisible in b bᵀ
    Ok((gl_act(f, &rot, tol)?, rot))
}

fn negligible_rel<T: Scalar>(x: &T, u: &Vec2<T>, v: &Vec2<T>, tol: f64) -> bool {
    x.negligible(tol * u.norm_f64() * v.norm_f64())
}

pub fn rank_one_profile<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RankOneProfile<T>> {
    if f.k != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: f.k });
    }
    let collect = |xs: &[SymMat<T>]| -> Result<Vec<RankOneFactor<T>>> {
        let mut out = Vec::new();
        for (index, x) in xs.iter().enumerate() {
            let st = psd_status(x, tol);
            if !st.psd {
                return Err(Error::NotPsd);
            }
            if st.rank == 1 {
                let (vector, scale) = rank_one_factor(x, tol)?;
                out.push(RankOneFactor { index, vector, scale });
            }
        }
        Ok(out)
    };
    let a = collect(&f.a)?;
    let b = collect(&f.b)?;
    let mut orth_pairs = Vec::new();
    for (pi, x) in a.iter().enumerate() {
        for (pj, y) in b.iter().enumerate() {
            if negligible_rel(&x.vector.dot(&y.vector), &x.vector, &y.vector, tol) {
                orth_pairs.push((pi, pj));
            }
        }
    }
    let mut degenerate_pairs = Vec::new();
    for (side, vs) in [(Side::A, &a), (Side::B, &b)] {
        for s in 0..vs.len() {
            for t in s + 1..vs.len() {
                let (u, v) = (&vs[s].vector, &vs[t].vector);
                if negligible_rel(&det2(u, v), u, v, tol) {
                    degenerate_pairs.push(DegeneratePair { side, first: vs[s].index, second: vs[t].index });
                }
            }
        }
    }
    Ok(RankOneProfile { a, b, orth_pairs, degenerate_pairs })
}

impl<T: Scalar> RankOneProfile<T> {
    pub fn p_bar(&self) -> usize {
        self.a.len()
    }

    pub fn q_bar(&self) -> usize {
        self.b.len()
    }

    pub fn side(&self, side: Side) -> &[RankOneFactor<T>] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// Orthogonal pairs as 0-based source indices.
    pub fn orth_source_pairs(&self) -> Vec<(usize, usize)> {
        self.orth_pairs.iter().map(|&(i, j)| (self.a[i].index, self.b[j].index)).collect()
    }

    /// Floating-point vectors with the scale folded in: `√scale · v`.
    pub fn to_f64(&self) -> RankOneProfile<f64> {
        let conv = |r: &RankOneFactor<T>| {
            let s = r.scale.as_f64().sqrt();
            RankOneFactor { index: r.index, vector: Vec2(r.vector.0.as_f64() * s, r.vector.1.as_f64() * s), scale: 1.0 }
        };
        RankOneProfile {
            a: self.a.iter().map(conv).collect(),
            b: self.b.iter().map(conv).collect(),
            orth_pairs: self.orth_pairs.clone(),
            degenerate_pairs: self.degenerate_pairs.clone(),
        }
    }

    pub fn a_vectors(&self) -> Vec<Vec2<T>> {
        self.a.iter().map(|r| r.vector.clone()).collect()
    }

    pub fn b_vectors(&self) -> Vec<Vec2<T>> {
        self.b.iter().map(|r| r.vector.clone()).collect()
    }
}

impl RankOneProfile<f64> {
    /// Profile of plain vectors (source indices 0..).
    pub fn from_vectors(a: &[Vec2<f64>], b: &[Vec2<f64>], tol: f64) -> RankOneProfile<f64> {
        let f = PsdFactorization::from_vectors(a, b).expect("nonempty");
        let mut p = rank_one_profile(&f, tol).expect("rank-one vectors");
        // keep the caller's vectors rather than the re-extracted ones
        p.a.iter_mut().zip(a).for_each(|(r, v)| r.vector = v.clone());
        p.b.iter_mut().zip(b).for_each(|(r, v)| r.vector = v.clone());
        p
    }
}

/// Extends a factorization by positive definite factors.
pub fn append_rank_two_factors<T: Scalar>(
    f: &PsdFactorization<T>,
    extra_a: &[SymMat<T>],
    extra_b: &[SymMat<T>],
    tol: f64,
) -> Result<PsdFactorization<T>> {
    for x in extra_a.iter().chain(extra_b) {
        if x.k() != f.k {
            return Err(Error::DimensionMismatch { expected: f.k, found: x.k() });
        }
        let st = psd_status(x, tol);
        if !st.psd || st.rank != f.k {
            return Err(Error::NotPositiveDefinite);
        }
    }
    let mut g = f.clone();
    g.a.extend_from_slice(extra_a);
    g.b.extend_from_slice(extra_b);
    let had_m = g.m.is_some();
    g.m = None;
    if had_m {
        g.m = Some(g.reconstruct()?);
    }
    Ok(g)
}

/// Instance shape for [`generate`]: `p_bar`/`q_bar` rank-one factors, then
/// `extra_a`/`extra_b` random positive definite ones; `zeros` are 0-based
/// (a, b) positions among the rank-one factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub p_bar: usize,
    pub q_bar: usize,
    pub extra_a: usize,
    pub extra_b: usize,
    pub zeros: Vec<(usize, usize)>,
}

// generated instances keep this much separation from degeneracy
const GEN_MARGIN: f64 = 1e-2;
const GEN_RETRIES: usize = 100;

fn unit(theta: f64) -> Vec2<f64> {
    Vec2(theta.cos(), theta.sin())
}

fn random_pd(rng: &mut ChaCha8Rng) -> SymMat<f64> {
    let l11: f64 = rng.gen_range(0.5..2.0);
    let l22: f64 = rng.gen_range(0.5..2.0);
    let l21: f64 = rng.gen_range(-1.0..1.0);
    // L Lᵀ with L lower triangular
    SymMat::from_entries2(l11 * l11, l11 * l21, l21 * l21 + l22 * l22)
}

fn check_pattern(spec: &GeneratorSpec) -> Result<()> {
    let mut used_a = vec![false; spec.p_bar];
    let mut used_b = vec![false; spec.q_bar];
    for &(i, j) in &spec.zeros {
        if i >= spec.p_bar || j >= spec.q_bar {
            return Err(Error::Generator(format!("zero ({}, {}) outside the rank-one block", i + 1, j + 1)));
        }
        if used_a[i] || used_b[j] {
            return Err(Error::Generator(format!(
                "zero ({}, {}) shares a row or column with another zero; two zeros in one line force parallel vectors",
                i + 1,
                j + 1
            )));
        }
        used_a[i] = true;
        used_b[j] = true;
    }
    Ok(())
}

/// Deterministic random factorization with prescribed orthogonal pairs.
/// Each a_i is uniform on the circle; a prescribed zero (i, j) sets b_j to a_i
/// rotated by 90°; magnitudes are random. Instances with degenerate pairs,
/// unintended near-zeros, or rank(M) ≠ 3 are resampled.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<PsdFactorization<f64>> {
    let p = spec.p_bar + spec.extra_a;
    let q = spec.q_bar + spec.extra_b;
    if p < 3 || q < 3 {
        return Err(Error::Generator(format!("a {p}×{q} matrix cannot have rank 3")));
    }
    check_pattern(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GEN_RETRIES {
        let ta: Vec<f64> = (0..spec.p_bar).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let mut tb: Vec<f64> = (0..spec.q_bar).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        for &(i, j) in &spec.zeros {
            tb[j] = ta[i] + PI / 2.0;
        }
        let a: Vec<Vec2<f64>> = ta.iter().map(|&t| unit(t).scale(&rng.gen_range(0.5..2.0))).collect();
        let b: Vec<Vec2<f64>> = tb.iter().map(|&t| unit(t).scale(&rng.gen_range(0.5..2.0))).collect();
        let mut fa: Vec<SymMat<f64>> = a.iter().map(SymMat::outer).collect();
        let mut fb: Vec<SymMat<f64>> = b.iter().map(SymMat::outer).collect();
        fa.extend((0..spec.extra_a).map(|_| random_pd(&mut rng)));
        fb.extend((0..spec.extra_b).map(|_| random_pd(&mut rng)));
        if !well_separated(&a, &b, &spec.zeros) {
            continue;
        }
        let f = PsdFactorization::new(fa, fb)?.with_reconstructed_m()?;
        let m = f.m.as_ref().unwrap();
        if !rank_three(m) || !zeros_exact(m, &spec.zeros) {
            continue;
        }
        return Ok(f);
    }
    Err(Error::Generator("no admissible instance within the retry budget".into()))
}

fn well_separated(a: &[Vec2<f64>], b: &[Vec2<f64>], zeros: &[(usize, usize)]) -> bool {
    let sep = |x: f64, u: &Vec2<f64>, v: &Vec2<f64>| x.abs() > GEN_MARGIN * u.norm_f64() * v.norm_f64();
    for vs in [a, b] {
        for s in 0..vs.len() {
            for t in s + 1..vs.len() {
                if !sep(det2(&vs[s], &vs[t]), &vs[s], &vs[t]) {
                    return false;
                }
            }
        }
    }
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            if !zeros.contains(&(i, j)) && !sep(u.dot(v), u, v) {
                return false;
            }
        }
    }
    true
}

fn rank_three(m: &[Vec<f64>]) -> bool {
    let dm = nalgebra::DMatrix::from_fn(m.len(), m[0].len(), |i, j| m[i][j]);
    let sv = dm.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s.len() >= 3 && s[2] > 1e-6 * s[0] && s.get(3).is_none_or(|&x| x < 1e-9 * s[0])
}

// orthogonality is constructed, so prescribed zeros are exact up to rounding
fn zeros_exact(m: &[Vec<f64>], zeros: &[(usize, usize)]) -> bool {
    zeros.iter().all(|&(i, j)| m[i][j].abs() < 1e-12)
}

/// All-rank-one instance with the given zero pattern.
pub fn generate_rank_one(p: usize, q: usize, zeros: &[(usize, usize)], seed: u64) -> Result<PsdFactorization<f64>> {
    generate(&GeneratorSpec { p_bar: p, q_bar: q, extra_a: 0, extra_b: 0, zeros: zeros.to_vec() }, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_sharing_a_row_is_rejected() {
        let r = generate_rank_one(3, 3, &[(0, 0), (0, 1)], 1);
        assert!(matches!(r, Err(Error::Generator(_))));
    }

    #[test]
    fn generator_is_deterministic() {
        let f = generate_rank_one(3, 4, &[(1, 2)], 9).unwrap();
        let g = generate_rank_one(3, 4, &[(1, 2)], 9).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn inverse2_singular() {
        assert_eq!(inverse2(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-9), Err(Error::Singular));
    }
}
