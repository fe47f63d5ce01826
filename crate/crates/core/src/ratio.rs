//! Parsing and small helpers for exact rationals.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"u/v"` or a bare integer `"u"` into an exact rational.
///
/// Decimal points are rejected on purpose: every exact input stays exact.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidInput(format!("expected a rational `u/v`, got `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_bigint(u: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, u.clone())
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// The representative of `r` modulo 1 in `[0, 1)`.
pub fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// `2^128` as an exact big integer.
pub fn two_pow_128() -> BigInt {
    BigInt::one() << 128u32
}

/// Reduces an integer modulo `2^128` into a `u128`.
pub fn mod_2_128(v: &BigInt) -> u128 {
    let m = two_pow_128();
    let r = v.mod_floor(&m);
    r.to_u128().expect("value reduced modulo 2^128 fits in u128")
}

/// Ceiling of a nonnegative rational as a saturating `u128`.
pub fn ceil_u128(r: &BigRational) -> u128 {
    let c = r.ceil().to_integer();
    if c.is_negative() {
        0
    } else {
        c.to_u128().unwrap_or(u128::MAX)
    }
}

/// Natural log of a big unsigned integer, valid far beyond the f64 range.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().map(f64::ln).unwrap_or(f64::INFINITY)
    } else {
        let shift = bits - 64;
        let top = (v >> shift).to_f64().unwrap_or(f64::MAX);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

pub fn ln_rational(r: &BigRational) -> f64 {
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    ln_biguint(n) - ln_biguint(d)
}
