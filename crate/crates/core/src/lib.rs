//! Exact simulation of deterministic walks in random scenery driven by
//! irrational rotations with prescribed continued-fraction growth.
//!
//! The exact lanes are generic over `num-traits`; the aliases below fix the
//! scalar types the rest of the crate uses.

pub mod cf;
pub mod complexity;
mod dec;
pub mod error;
pub mod ratio;
pub mod rotation;
pub mod sampling;
pub mod scenery;
pub mod system;

pub use error::{Error, Result};

/// Integer type of digits and convergents.
pub type Int = num_bigint::BigUint;
/// Exact rationals for angles and enclosures.
pub type Rational = num_rational::BigRational;
/// Float type of the estimators.
pub type Real = f64;

pub type Convergent = cf::Convergent<Int>;
pub type DimensionEstimate = complexity::DimensionEstimate<Real>;
