//! Exact points of the form `r + cα` and circle angles `{s + kα}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratio::{format_rational, frac, half};
use crate::system::System;

/// The real number `r + cα` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Linear {
    pub r: BigRational,
    pub c: BigRational,
}

fn magnitude_bits(c: &BigRational) -> u64 {
    let n = c.numer().bits() as i64;
    let d = c.denom().bits() as i64;
    (n - d + 1).max(0) as u64
}

impl Linear {
    pub fn new(r: BigRational, c: BigRational) -> Self {
        Linear { r, c }
    }

    pub fn rational(r: BigRational) -> Self {
        Linear { r, c: BigRational::zero() }
    }

    /// `cα` for an integer `c`.
    pub fn multiple(c: i64) -> Self {
        Linear { r: BigRational::zero(), c: BigRational::from_integer(BigInt::from(c)) }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn add(&self, o: &Linear) -> Linear {
        Linear { r: &self.r + &o.r, c: &self.c + &o.c }
    }

    pub fn sub(&self, o: &Linear) -> Linear {
        Linear { r: &self.r - &o.r, c: &self.c - &o.c }
    }

    pub fn scale(&self, k: &BigRational) -> Linear {
        Linear { r: &self.r * k, c: &self.c * k }
    }

    pub fn add_rational(&self, q: &BigRational) -> Linear {
        Linear { r: &self.r + q, c: self.c.clone() }
    }

    pub fn is_rational(&self) -> bool {
        self.c.is_zero()
    }

    /// Open interval containing the value, from the enclosure at `depth`.
    pub fn enclose_at(&self, sys: &System, depth: usize) -> (BigRational, BigRational) {
        let (a, b) = sys.enclosure(depth).scale(&self.c);
        (&self.r + a, &self.r + b)
    }

    pub fn to_f64(&self, sys: &System) -> f64 {
        let (lo, hi) = self.enclose_at(sys, sys.max_depth());
        ((lo + hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// Runs `decide` on enclosures of increasing depth until it returns an
    /// answer. Only called for irrational values (`c ≠ 0`).
    fn refine<T>(&self, sys: &System, what: &str, mut decide: impl FnMut(&BigRational, &BigRational) -> Option<T>) -> Result<T> {
        let start = sys.start_depth(magnitude_bits(&self.c));
        for depth in start..=sys.max_depth() {
            let (lo, hi) = self.enclose_at(sys, depth);
            if let Some(v) = decide(&lo, &hi) {
                return Ok(v);
            }
        }
        Err(Error::Undecided { depth: sys.max_depth(), what: what.to_string() })
    }

    pub fn sign(&self, sys: &System) -> Result<Ordering> {
        if self.is_rational() {
            return Ok(self.r.cmp(&BigRational::zero()));
        }
        let zero = BigRational::zero();
        self.refine(sys, "sign of r + cα", |lo, hi| {
            if lo >= &zero {
                Some(Ordering::Greater)
            } else if hi <= &zero {
                Some(Ordering::Less)
            } else {
                None
            }
        })
    }

    pub fn cmp(&self, other: &Linear, sys: &System) -> Result<Ordering> {
        self.sub(other).sign(sys)
    }

    pub fn floor(&self, sys: &System) -> Result<BigInt> {
        if self.is_rational() {
            return Ok(self.r.floor().to_integer());
        }
        self.refine(sys, "integer part of r + cα", |lo, hi| {
            let f = lo.floor();
            (hi <= &(&f + BigRational::one())).then(|| f.to_integer())
        })
    }

    /// The representative in `[0, 1)`.
    pub fn frac(&self, sys: &System) -> Result<Linear> {
        let f = self.floor(sys)?;
        Ok(self.add_rational(&-BigRational::from_integer(f)))
    }
}

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})α", format_rational(&self.r), format_rational(&self.c))
    }
}

/// A point `{s + kα}` of the circle with `s ∈ [0, 1)`.
///
/// The multiplier `k` is an integer for orbit points; a rational `k` lets
/// arc endpoints such as `ℓα + ¼‖q_nα‖` stay exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    s: BigRational,
    k: BigRational,
}

impl Angle {
    pub fn new(s: BigRational, k: BigRational) -> Self {
        Angle { s: frac(&s), k }
    }

    pub fn rational(s: BigRational) -> Self {
        Self::new(s, BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn half() -> Self {
        Self::rational(half())
    }

    /// `{jα}`.
    pub fn orbit(j: i64) -> Self {
        Self::new(BigRational::zero(), BigRational::from_integer(j.into()))
    }

    pub fn from_linear(x: &Linear) -> Self {
        Self::new(x.r.clone(), x.c.clone())
    }

    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn k(&self) -> &BigRational {
        &self.k
    }

    pub fn linear(&self) -> Linear {
        Linear::new(self.s.clone(), self.k.clone())
    }

    /// The orbits of `0` and `1/2` themselves, where the half-open coding
    /// convention decides symbols.
    pub fn is_boundary_orbit(&self) -> bool {
        self.k.is_zero() && (self.s.is_zero() || self.s == half())
    }

    /// `k` as a machine integer when it is one.
    pub fn integer_k(&self) -> Option<i64> {
        if self.k.is_integer() {
            self.k.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn shift_alpha(&self, j: i64) -> Angle {
        Angle { s: self.s.clone(), k: &self.k + BigRational::from_integer(j.into()) }
    }

    pub fn add_half(&self) -> Angle {
        Angle::new(&self.s + half(), self.k.clone())
    }

    pub fn add(&self, x: &Linear) -> Angle {
        Angle::new(&self.s + &x.r, &self.k + &x.c)
    }

    /// The exact representative of the angle in `[0, 1)`.
    pub fn value(&self, sys: &System) -> Result<Linear> {
        self.linear().frac(sys)
    }

    pub fn to_f64(&self, sys: &System) -> f64 {
        let v = self.linear().to_f64(sys);
        v - v.floor()
    }

    /// Order of the representatives in `[0, 1)`.
    pub fn cmp_on_circle(&self, other: &Angle, sys: &System) -> Result<Ordering> {
        if self == other {
            return Ok(Ordering::Equal);
        }
        if self.k == other.k && self.k.is_zero() {
            return Ok(self.s.cmp(&other.s));
        }
        self.value(sys)?.cmp(&other.value(sys)?, sys)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k.is_zero() {
            write!(f, "{}", format_rational(&self.s))
        } else {
            write!(f, "{{{} + ({})α}}", format_rational(&self.s), format_rational(&self.k))
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Angle", 2)?;
        st.serialize_field("s", &format_rational(&self.s))?;
        st.serialize_field("k", &format_rational(&self.k))?;
        st.end()
    }
}

/// `-x` as a linear form.
pub fn neg(x: &Linear) -> Linear {
    Linear { r: -&x.r, c: -&x.c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::ratio::parse_rational;
    use crate::system::Config;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn canonical_form_reduces_mod_one() {
        let a = Angle::rational(r("7/3"));
        assert_eq!(a.s(), &r("1/3"));
        assert_eq!(Angle::rational(r("-1/4")).s(), &r("3/4"));
        assert!(Angle::zero().is_boundary_orbit());
        assert!(Angle::half().is_boundary_orbit());
        assert!(!Angle::orbit(1).is_boundary_orbit());
        assert!(!Angle::rational(r("1/3")).is_boundary_orbit());
    }

    #[test]
    fn golden_orbit_values() {
        let sys = System::golden(Config::default()).unwrap();
        let v = Angle::orbit(1).value(&sys).unwrap();
        assert!((v.to_f64(&sys) - 0.6180339887).abs() < 1e-9);
        let v2 = Angle::orbit(2).value(&sys).unwrap();
        assert!((v2.to_f64(&sys) - 0.2360679775).abs() < 1e-9);
        assert_eq!(Angle::orbit(2).cmp_on_circle(&Angle::orbit(1), &sys).unwrap(), Ordering::Less);
        assert_eq!(Angle::orbit(-1).value(&sys).unwrap().floor(&sys).unwrap(), BigInt::zero());
    }

    #[test]
    fn sign_of_best_approximation_errors_alternates() {
        let sys = System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap();
        for n in 0..6 {
            let p = BigRational::from_integer(crate::ratio::to_bigint(sys.p(n).unwrap()));
            let q = BigRational::from_integer(crate::ratio::to_bigint(sys.q(n).unwrap()));
            let err = Linear::new(-p, q);
            let expect = if n % 2 == 0 { Ordering::Greater } else { Ordering::Less };
            assert_eq!(err.sign(&sys).unwrap(), expect, "n={n}");
        }
    }

    #[test]
    fn rational_comparisons_are_exact() {
        let sys = System::golden(Config::default()).unwrap();
        let a = Linear::rational(r("1/2"));
        assert_eq!(a.floor(&sys).unwrap(), BigInt::zero());
        assert_eq!(a.cmp(&Linear::rational(r("1/2")), &sys).unwrap(), Ordering::Equal);
    }

    #[test]
    fn explicit_digits_run_out_of_depth() {
        let sys = System::from_digits(vec![2u32.into(), 2u32.into()], Config::default()).unwrap();
        // 12α vs 5: the two available convergents cannot separate them
        let x = Linear::new(r("-5"), r("12"));
        assert!(matches!(x.sign(&sys), Err(Error::Undecided { .. })));
    }
}
