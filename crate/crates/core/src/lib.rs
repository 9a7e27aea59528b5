//! Rigidity and uniqueness of size-2 psd factorizations of rank-3
//! nonnegative matrices.
//!
//! The matrix and factorization layers are generic over [`scalar::Scalar`]
//! (`f32`, `f64`, exact [`Rational`]); sign-only classifiers run in any of
//! them. Motion spaces, cones and the oracle need square roots and linear
//! programming and work in `f64`.

pub mod classify;
pub mod dense;
pub mod error;
pub mod factorization;
pub mod io;
pub mod linalg;
pub mod motions;
pub mod oracle;
pub mod scalar;
pub mod symcore;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar, Sign, DEFAULT_TOL};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type SymMatF32 = symcore::SymMat<f32>;
pub type SymMatF64 = symcore::SymMat<f64>;
pub type SymMatQ = symcore::SymMat<Rational>;

pub type Vec2F64 = symcore::Vec2<f64>;
pub type Vec2Q = symcore::Vec2<Rational>;

pub type FactorizationF32 = factorization::PsdFactorization<f32>;
pub type FactorizationF64 = factorization::PsdFactorization<f64>;
pub type FactorizationQ = factorization::PsdFactorization<Rational>;

pub type ProfileF64 = factorization::RankOneProfile<f64>;
pub type ProfileQ = factorization::RankOneProfile<Rational>;
