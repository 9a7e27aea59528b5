//! Rigidity classifiers for size-2 factorizations, dispatched on the number
//! of orthogonal rank-one pairs (zeros of M coming from rank-one factors).
//!
//! All inequality tests are sign products of determinants and inner
//! products; nothing is divided.

use std::fmt;

use crate::error::{Error, Result};
use crate::factorization::{matrix_rank, rank_one_profile, validate, PsdFactorization, RankOneProfile, Side};
use crate::motions::{
    build_cone_system, cone_interior_point, solve_two_inf_one_orth, solve_two_inf_two_orth, MotionMatrix, Variant,
};
use crate::scalar::{Scalar, Sign};
use crate::symcore::{det2, psd_status, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    NoOrth,
    OneOrth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    NotApplicable,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::NotApplicable => "not_applicable",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Source indices (0-based) of three A- and three B-factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub a: [usize; 3],
    pub b: [usize; 3],
}

impl Triple {
    /// 1-based, as printed in reports.
    pub fn one_based(&self) -> ([usize; 3], [usize; 3]) {
        (self.a.map(|i| i + 1), self.b.map(|j| j + 1))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.one_based();
        write!(f, "({},{},{} / {},{},{})", a[0], a[1], a[2], b[0], b[1], b[2])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Triple(Triple),
    Motion(MotionMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub one_inf_rigid: Verdict,
    pub two_inf_rigid: bool,
    pub locally_rigid: Verdict,
    pub globally_rigid: Verdict,
    pub witness: Option<Witness>,
    pub zero_count: usize,
    pub preconditions_met: bool,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl RigidityReport {
    pub fn verdicts(&self) -> (Verdict, bool, Verdict, Verdict) {
        (self.one_inf_rigid, self.two_inf_rigid, self.locally_rigid, self.globally_rigid)
    }

    pub fn triple(&self) -> Option<Triple> {
        match self.witness {
            Some(Witness::Triple(t)) => Some(t),
            _ => None,
        }
    }

    pub fn motion(&self) -> Option<&MotionMatrix> {
        match &self.witness {
            Some(Witness::Motion(m)) => Some(m),
            _ => None,
        }
    }
}

fn sign_det<T: Scalar>(u: &Vec2<T>, v: &Vec2<T>, tol: f64) -> Sign {
    Sign::of(&det2(u, v), tol * u.norm_f64() * v.norm_f64())
}

fn sign_dot<T: Scalar>(u: &Vec2<T>, v: &Vec2<T>, tol: f64) -> Sign {
    Sign::of(&u.dot(v), tol * u.norm_f64() * v.norm_f64())
}

fn product(signs: &[Sign]) -> Sign {
    signs.iter().fold(Sign::Positive, |acc, s| acc * *s)
}

/// The five (no_orth) or three (one_orth) conditions on one choice of
/// vectors, each as the sign of numerator·denominator.
fn triple_conditions<T: Scalar>(a: [&Vec2<T>; 3], b: [&Vec2<T>; 3], regime: Regime, tol: f64) -> Vec<Sign> {
    let da = |i: usize, j: usize| sign_det(a[i], a[j], tol);
    let db = |i: usize, j: usize| sign_det(b[i], b[j], tol);
    let ip = |i: usize, j: usize| sign_dot(a[i], b[j], tol);
    let c1 = product(&[db(0, 2), db(1, 2), ip(1, 2), ip(2, 2), da(0, 1), da(0, 2), ip(0, 0), ip(0, 1)]);
    let c2 = -product(&[db(0, 2), db(1, 2), ip(0, 2), ip(2, 2), da(0, 1), da(1, 2), ip(1, 0), ip(1, 1)]);
    let c3 = product(&[db(0, 2), db(1, 2), ip(0, 2), ip(1, 2), da(0, 2), da(1, 2), ip(2, 0), ip(2, 1)]);
    let c4 = product(&[db(1, 2), ip(0, 2), ip(1, 2), ip(2, 2), db(0, 1), ip(0, 0), ip(1, 0), ip(2, 0)]);
    let c5 = -product(&[db(0, 2), ip(0, 2), ip(1, 2), ip(2, 2), db(0, 1), ip(0, 1), ip(1, 1), ip(2, 1)]);
    match regime {
        Regime::NoOrth => vec![c1, c2, c3, c4, c5],
        Regime::OneOrth => vec![c2, c3, c5],
    }
}

fn holds(signs: &[Sign], strict: bool) -> bool {
    signs.iter().all(|s| *s == Sign::Positive || (!strict && *s == Sign::Zero))
}

fn pairs3(n: usize, fixed: Option<usize>) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    match fixed {
        Some(f) => {
            let rest: Vec<usize> = (0..n).filter(|&i| i != f).collect();
            for x in 0..rest.len() {
                for y in x + 1..rest.len() {
                    out.push([f, rest[x], rest[y]]);
                }
            }
        }
        None => {
            for x in 0..n {
                for y in x + 1..n {
                    for z in y + 1..n {
                        out.push([x, y, z]);
                    }
                }
            }
        }
    }
    out
}

/// First triple (lexicographic in profile positions) satisfying the sign
/// conditions. `strict = false` accepts zero signs (the non-strict form,
/// equivalent under nondegeneracy).
pub fn triple_search<T: Scalar>(
    profile: &RankOneProfile<T>,
    regime: Regime,
    strict: bool,
    tol: f64,
) -> Result<Option<Triple>> {
    let (p, q) = (profile.p_bar(), profile.q_bar());
    if p < 3 || q < 3 {
        return Err(Error::Precondition(vec![format!("triple search needs p̄, q̄ ≥ 3, found p̄ = {p}, q̄ = {q}")]));
    }
    let (fa, fb) = match regime {
        Regime::NoOrth => (None, None),
        Regime::OneOrth => {
            let &(i, j) = profile
                .orth_pairs
                .first()
                .ok_or_else(|| Error::Precondition(vec!["one_orth regime needs an orthogonal pair".into()]))?;
            (Some(i), Some(j))
        }
    };
    let (av, bv) = (profile.a_vectors(), profile.b_vectors());
    for ia in pairs3(p, fa) {
        for jb in pairs3(q, fb) {
            let a = ia.map(|i| &av[i]);
            let b = jb.map(|j| &bv[j]);
            if holds(&triple_conditions(a, b, regime, tol), strict) {
                return Ok(Some(Triple { a: ia.map(|i| profile.a[i].index), b: jb.map(|j| profile.b[j].index) }));
            }
        }
    }
    Ok(None)
}

fn degeneracy_violations<T: Scalar>(profile: &RankOneProfile<T>) -> Vec<String> {
    profile
        .degenerate_pairs
        .iter()
        .map(|d| {
            let s = d.side.to_string().to_lowercase();
            format!("det({s}{}, {s}{}) = 0", d.first + 1, d.second + 1)
        })
        .collect()
}

fn orth_violations<T: Scalar>(profile: &RankOneProfile<T>) -> Vec<String> {
    profile.orth_source_pairs().iter().map(|(i, j)| format!("⟨a{}, b{}⟩ = 0", i + 1, j + 1)).collect()
}

fn refuse_if(v: Vec<String>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(v))
    }
}

fn profile_of<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RankOneProfile<T>> {
    if f.k != 2 {
        return Err(Error::Precondition(vec![format!("size-2 factorizations only, found k = {}", f.k)]));
    }
    rank_one_profile(f, tol)
}

fn report(two_inf: bool, one_inf: Verdict, local: Verdict, global: Verdict, zeros: usize) -> RigidityReport {
    RigidityReport {
        one_inf_rigid: one_inf,
        two_inf_rigid: two_inf,
        locally_rigid: local,
        globally_rigid: global,
        witness: None,
        zero_count: zeros,
        preconditions_met: true,
        violations: vec![],
        notes: vec![],
    }
}

fn no_orth<T: Scalar>(f: &PsdFactorization<T>, strict: bool, tol: f64) -> Result<RigidityReport> {
    let profile = profile_of(f, tol)?;
    let mut bad = orth_violations(&profile);
    bad.extend(degeneracy_violations(&profile));
    refuse_if(bad)?;
    let triple = if profile.p_bar() >= 3 && profile.q_bar() >= 3 {
        triple_search(&profile, Regime::NoOrth, strict, tol)?
    } else {
        None
    };
    let rigid = triple.is_some();
    let v = Verdict::from(rigid);
    let mut r = report(rigid, v, v, v, 0);
    match triple {
        Some(t) => r.witness = Some(Witness::Triple(t)),
        None => {
            if profile.p_bar() < 3 || profile.q_bar() < 3 {
                r.notes.push(format!(
                    "fewer than three rank-one factors on a side (p̄ = {}, q̄ = {}): the cone of 1-infinitesimal motions is full-dimensional",
                    profile.p_bar(),
                    profile.q_bar()
                ));
            }
            let c = build_cone_system(&profile.to_f64(), Variant::Full, tol)?;
            match cone_interior_point(&c, tol)? {
                Some(d) => r.witness = Some(Witness::Motion(MotionMatrix::from_row_major(3, d)?)),
                None => r.notes.push("no triple found but the LP found no interior point".into()),
            }
        }
    }
    Ok(r)
}

/// No orthogonal pairs: all four notions of rigidity agree for positive M.
pub fn classify_no_orth<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RigidityReport> {
    no_orth(f, true, tol)
}

/// Exactly one orthogonal pair.
pub fn classify_one_orth<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RigidityReport> {
    let profile = profile_of(f, tol)?;
    let n = profile.orth_pairs.len();
    let mut bad = degeneracy_violations(&profile);
    if n != 1 {
        bad.insert(0, format!("wrong regime: expected exactly one orthogonal pair, found {n}"));
    }
    refuse_if(bad)?;
    let triple = if profile.p_bar() >= 3 && profile.q_bar() >= 3 {
        triple_search(&profile, Regime::OneOrth, true, tol)?
    } else {
        None
    };
    let rigid = triple.is_some();
    let unknown_or_false = if rigid { Verdict::Unknown } else { Verdict::False };
    let mut r = report(rigid, Verdict::NotApplicable, unknown_or_false, unknown_or_false, 1);
    r.notes.push("a matrix with a zero has no 1-infinitesimally rigid size-2 factorization".into());
    match triple {
        Some(t) => {
            r.witness = Some(Witness::Triple(t));
            r.notes.push("local/global rigidity is conjectured but not proven to follow from 2-infinitesimal rigidity when M has zeros".into());
        }
        None => {
            let space = solve_two_inf_one_orth(&profile.to_f64(), tol)?;
            match space.witness {
                Some(w) => r.witness = Some(Witness::Motion(w)),
                None => r.notes.push("no triple found but the motion solver returned only dI".into()),
            }
        }
    }
    Ok(r)
}

/// Two or more orthogonal pairs: rigid iff p̄, q̄ ≥ 3.
pub fn classify_two_orth<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RigidityReport> {
    let profile = profile_of(f, tol)?;
    let n = profile.orth_pairs.len();
    let mut bad = degeneracy_violations(&profile);
    if n < 2 {
        bad.insert(0, format!("wrong regime: expected at least two orthogonal pairs, found {n}"));
    }
    let pairs = profile.orth_source_pairs();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[x + 1..] {
            if i == k || j == l {
                bad.push(format!(
                    "orthogonal pairs (a{}, b{}) and (a{}, b{}) share a factor",
                    i + 1,
                    j + 1,
                    k + 1,
                    l + 1
                ));
            }
        }
    }
    if profile.p_bar() < 2 || profile.q_bar() < 2 {
        bad.push(format!("need p̄, q̄ ≥ 2, found p̄ = {}, q̄ = {}", profile.p_bar(), profile.q_bar()));
    }
    refuse_if(bad)?;
    let rigid = profile.p_bar() >= 3 && profile.q_bar() >= 3;
    let mut r = report(rigid, Verdict::NotApplicable, Verdict::Unknown, Verdict::Unknown, n);
    r.notes.push("local and global rigidity are not decided for matrices with two or more zeros".into());
    if !rigid {
        let space = solve_two_inf_two_orth(&profile.to_f64(), tol)?;
        match space.witness {
            Some(w) => r.witness = Some(Witness::Motion(w)),
            None => r.notes.push("p̄ or q̄ < 3 but the motion solver returned only dI".into()),
        }
    }
    Ok(r)
}

/// Dispatch on the orthogonal-pair count without validating M.
pub fn classify<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RigidityReport> {
    match profile_of(f, tol)?.orth_pairs.len() {
        0 => classify_no_orth(f, tol),
        1 => classify_one_orth(f, tol),
        _ => classify_two_orth(f, tol),
    }
}

/// Is F the unique size-2 factorization of M up to GL(2)? Validates F and
/// rank(M) = 3 first.
pub fn uniqueness<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<RigidityReport> {
    if f.k != 2 {
        return Err(Error::Precondition(vec![format!("size-2 factorizations only, found k = {}", f.k)]));
    }
    let v = validate(f, tol);
    let mut bad = Vec::new();
    for (side, i) in &v.psd_failures {
        bad.push(format!("{side}{} is not positive semidefinite", i + 1));
    }
    for (i, j) in &v.mismatches {
        bad.push(format!("M[{}][{}] differs from ⟨A{}, B{}⟩", i + 1, j + 1, i + 1, j + 1));
    }
    if !v.shape_ok {
        bad.push("M has the wrong shape".into());
    }
    refuse_if(bad)?;
    let m = f.target()?;
    let rank = matrix_rank(&m, tol);
    if rank != 3 {
        return Err(Error::Precondition(vec![format!("rank(M) = {rank}, expected 3")]));
    }
    match profile_of(f, tol)?.orth_pairs.len() {
        0 => no_orth(f, false, tol),
        1 => classify_one_orth(f, tol),
        _ => classify_two_orth(f, tol),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryVerdict {
    InteriorCertificate,
    BoundaryConsistent,
    Inconclusive,
}

impl fmt::Display for BoundaryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryVerdict::InteriorCertificate => "interior_certificate",
            BoundaryVerdict::BoundaryConsistent => "boundary_consistent",
            BoundaryVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub verdict: BoundaryVerdict,
    pub evidence: String,
}

/// One-sided evidence about whether M lies on the boundary of the set of
/// psd-rank-2 matrices, read off this particular factorization.
pub fn boundary_report<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> Result<BoundaryReport> {
    if f.k != 2 {
        return Err(Error::Precondition(vec![format!("size-2 factorizations only, found k = {}", f.k)]));
    }
    let m = f.target()?;
    let scale = m.iter().flatten().map(|x| x.abs().as_f64()).fold(1.0, f64::max);
    let zeros: Vec<String> = m
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, x)| (i, j, x)))
        .filter(|(_, _, x)| !x.is_positive() || x.negligible(tol * scale))
        .map(|(i, j, _)| format!("M[{}][{}] is not positive (boundary for a trivial reason)", i + 1, j + 1))
        .collect();
    refuse_if(zeros)?;
    let ranks: Vec<usize> =
        [Side::A, Side::B].iter().flat_map(|&s| f.factors(s).iter().map(|x| psd_status(x, tol).rank)).collect();
    if ranks.iter().all(|&r| r == 2) {
        return Ok(BoundaryReport {
            verdict: BoundaryVerdict::InteriorCertificate,
            evidence: "every factor has rank 2, so M is in the interior".into(),
        });
    }
    let profile = rank_one_profile(f, tol)?;
    let (p, q) = (profile.p_bar(), profile.q_bar());
    if p >= 3 && q >= 3 {
        Ok(BoundaryReport {
            verdict: BoundaryVerdict::BoundaryConsistent,
            evidence: format!("p̄ = {p}, q̄ = {q}: at least three rank-one factors on each side"),
        })
    } else {
        Ok(BoundaryReport {
            verdict: BoundaryVerdict::Inconclusive,
            evidence: format!(
                "p̄ = {p}, q̄ = {q}: a rank-deficient factor but fewer than three rank-one factors on a side"
            ),
        })
    }
}
