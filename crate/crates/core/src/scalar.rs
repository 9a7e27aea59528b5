//! Scalar abstraction shared by the symmetric-matrix and factorization layers.
//!
//! Floats decide signs and ranks against a tolerance; exact rationals ignore
//! the tolerance and compare against zero.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Default tolerance for every sign and rank decision.
pub const DEFAULT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True for exact arithmetic; tolerances are then ignored.
    const EXACT: bool;

    /// `|self| <= tol` for floats, `self == 0` for exact types.
    fn negligible(&self, tol: f64) -> bool;

    /// Square root if it is representable in this type.
    fn sqrt_checked(&self) -> Option<Self>;

    fn from_f64_lossy(x: f64) -> Self;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating scalars: everything needing √2 lives here.
pub trait Real: Scalar + num_traits::Float {}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn negligible(&self, tol: f64) -> bool {
        (self.abs() as f64) <= tol
    }
    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {}
impl Real for f32 {}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn sqrt_checked(&self) -> Option<Self> {
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }
    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
}

/// Three-way sign at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Scalar>(x: &T, tol: f64) -> Sign {
        if x.negligible(tol) {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Parse "num/den", an integer, or a decimal into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // decimal with optional exponent, converted exactly
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, shift.unsigned_abs() as usize))
    };
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        let q = parse_rational("9/16").unwrap();
        assert_eq!(q.sqrt_checked(), parse_rational("3/4"));
        assert_eq!(parse_rational("2").unwrap().sqrt_checked(), None);
        assert_eq!(parse_rational("-1/4").unwrap().sqrt_checked(), None);
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.25"), parse_rational("1/4"));
        assert_eq!(parse_rational("-1.5"), parse_rational("-3/2"));
        assert_eq!(parse_rational("1e3"), parse_rational("1000"));
        assert_eq!(parse_rational("2.5E-2"), parse_rational("1/40"));
        assert!(parse_rational("1e").is_none());
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn sign_products() {
        assert_eq!(Sign::of(&-2.0, 1e-9) * Sign::of(&-1.0, 1e-9), Sign::Positive);
        assert_eq!(Sign::of(&1e-12, 1e-9), Sign::Zero);
        let tiny = parse_rational("1/1000000000000").unwrap();
        assert_eq!(Sign::of(&tiny, 1e-9), Sign::Positive);
    }
}
