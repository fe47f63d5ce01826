//! Continued fractions of the rotation number: partial quotients, exact
//! convergents, certified enclosures of α and of ‖kα‖.
//!
//! The rotation number is never materialized as a float. It is known only
//! through its partial quotients `a₁, a₂, …` (with `a₀ = 0`), and every
//! statement about it is certified from a pair of consecutive convergents.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dec;
use crate::error::{Error, Result};
use crate::ratio::{half, to_bigint};

/// An exact rational `τ ∈ (0, 1)` with a small numerator and denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tau {
    num: u32,
    den: u32,
}

impl Tau {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidTau(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Tau { num: num / g, den: den / g })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidTau(text.to_string());
        let (n, d) = text.trim().split_once('/').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let d: u32 = d.trim().parse().map_err(|_| bad())?;
        Tau::new(n, d)
    }

    pub fn numer(&self) -> u32 {
        self.num
    }

    pub fn denom(&self) -> u32 {
        self.den
    }

    /// `τ/(1−τ)` as a reduced pair `(u, w)`.
    pub fn exponent(&self) -> (u32, u32) {
        let (u, w) = (self.num, self.den - self.num);
        let g = u.gcd(&w);
        (u / g, w / g)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Tau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Tau::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Resource guard on the size of the denominators `qₙ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitBudget {
    pub max_decimal_digits: u32,
}

impl Default for DigitBudget {
    fn default() -> Self {
        DigitBudget { max_decimal_digits: 300 }
    }
}

impl DigitBudget {
    fn limit(&self) -> BigUint {
        BigUint::from(10u32).pow(self.max_decimal_digits)
    }

    fn limit_bits(&self) -> u64 {
        (self.max_decimal_digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 1
    }
}

/// How partial quotients beyond the stored ones are produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DigitRule {
    /// Exactly the stored digits; nothing more is known.
    Explicit,
    /// The stored period repeats forever (`[1]` is the golden rotation).
    Periodic {
        #[serde(with = "dec::vec")]
        period: Vec<BigUint>,
    },
    /// `a₁ = 5`, `aₙ₊₁ = 2⌊qₙ^(τ/(1−τ))⌋ + 1`.
    Dimension { tau: Tau },
    /// Same construction with a per-index exponent: `aₙ₊₁` uses `taus[n−1]`.
    Staircase { taus: Vec<Tau> },
}

/// Largest `x` with `x^den ≤ base^num`, i.e. `⌊base^(num/den)⌋`, by exact
/// integer root extraction.
pub fn floor_rational_power<T>(base: &T, num: u32, den: u32) -> T
where
    T: Roots + Pow<u32, Output = T> + Clone,
{
    base.clone().pow(num).nth_root(den)
}

/// Partial quotients `a₁..a_N` of a rotation number in `(0, 1)` (`a₀ = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialQuotients {
    pub rule: DigitRule,
    #[serde(with = "dec::vec")]
    pub digits: Vec<BigUint>,
}

impl PartialQuotients {
    pub fn explicit(digits: Vec<BigUint>) -> Result<Self> {
        if digits.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("partial quotients must be >= 1".into()));
        }
        Ok(PartialQuotients { rule: DigitRule::Explicit, digits })
    }

    pub fn periodic(period: Vec<BigUint>, count: usize) -> Result<Self> {
        if period.is_empty() || period.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("period must be nonempty with entries >= 1".into()));
        }
        let digits = period.iter().cycle().take(count).cloned().collect();
        Ok(PartialQuotients { rule: DigitRule::Periodic { period }, digits })
    }

    /// `[0; 1, 1, 1, …]`, the golden rotation `α = (√5 − 1)/2`.
    pub fn golden(count: usize) -> Self {
        Self::periodic(vec![BigUint::one()], count).expect("nonempty period")
    }

    pub fn staircase(taus: Vec<Tau>, count: usize, budget: DigitBudget) -> Result<Self> {
        let mut pq = PartialQuotients { rule: DigitRule::Staircase { taus }, digits: Vec::new() };
        pq.extend_to(count, budget)?;
        Ok(pq)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `aₙ`, with `a₀ = 0`.
    pub fn digit(&self, n: usize) -> Option<BigUint> {
        if n == 0 {
            Some(BigUint::zero())
        } else {
            self.digits.get(n - 1).cloned()
        }
    }

    /// Extends the stored digits to `count` entries, failing if the rule has
    /// nothing more to give or some `qₙ` would exceed the budget.
    pub fn extend_to(&mut self, count: usize, budget: DigitBudget) -> Result<()> {
        let limit = budget.limit();
        // (q_{n-1}, q_n) starting from (q_{-1}, q_0) = (0, 1)
        let (mut q_before, mut q) = (BigUint::zero(), BigUint::one());
        for a in &self.digits {
            let next = a * &q + &q_before;
            q_before = std::mem::replace(&mut q, next);
        }
        while self.digits.len() < count {
            let n = self.digits.len(); // generating a_{n+1} from q_n
            let a = self.next_digit(n, &q, budget)?;
            let next = &a * &q + &q_before;
            if next > limit {
                return Err(Error::DigitBudget { index: n + 1, max_digits: budget.max_decimal_digits });
            }
            self.digits.push(a);
            q_before = std::mem::replace(&mut q, next);
        }
        Ok(())
    }

    /// Extends as far as possible toward `count`, stopping silently at the
    /// budget or when the rule is exhausted. Returns the new length.
    pub fn extend_within_budget(&mut self, count: usize, budget: DigitBudget) -> usize {
        while self.digits.len() < count {
            if self.extend_to(self.digits.len() + 1, budget).is_err() {
                break;
            }
        }
        self.digits.len()
    }

    fn next_digit(&self, n: usize, q_n: &BigUint, budget: DigitBudget) -> Result<BigUint> {
        let exhausted = || Error::DigitsExhausted { needed: n + 1, available: n };
        let tau = match &self.rule {
            DigitRule::Explicit => return Err(exhausted()),
            DigitRule::Periodic { period } => return Ok(period[n % period.len()].clone()),
            DigitRule::Dimension { tau } => *tau,
            DigitRule::Staircase { taus } => {
                if n == 0 {
                    return Ok(BigUint::from(5u32));
                }
                *taus.get(n - 1).ok_or_else(exhausted)?
            }
        };
        if n == 0 {
            return Ok(BigUint::from(5u32));
        }
        let (u, w) = tau.exponent();
        // a_{n+1} ≈ 2 q_n^(u/w); refuse before building an astronomically large power.
        if q_n.bits().saturating_mul(u as u64) / (w as u64) > budget.limit_bits() {
            return Err(Error::DigitBudget { index: n + 1, max_digits: budget.max_decimal_digits });
        }
        let root = floor_rational_power(q_n, u, w);
        Ok(root * 2u32 + 1u32)
    }

    /// Exact convergents `(p_k, q_k)` for `k = 0..=n`.
    pub fn convergents(&self, n: usize) -> Result<Vec<Convergent<BigUint>>> {
        if n > self.digits.len() {
            return Err(Error::DigitsExhausted { needed: n, available: self.digits.len() });
        }
        Ok(convergents(&self.digits, n))
    }
}

/// Builds the partial quotients of the rotation number whose skew product
/// has entropy dimension `τ`.
pub fn quotients_for_dimension(tau: Tau, count: usize, budget: DigitBudget) -> Result<PartialQuotients> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be >= 1".into()));
    }
    let mut pq = PartialQuotients { rule: DigitRule::Dimension { tau }, digits: Vec::new() };
    pq.extend_to(count, budget)?;
    Ok(pq)
}

/// A best-approximation pair `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent<T: fmt::Display> {
    #[serde(rename = "n")]
    pub index: usize,
    #[serde(serialize_with = "dec::display")]
    pub p: T,
    #[serde(serialize_with = "dec::display")]
    pub q: T,
}

/// `q_n = a_n q_{n−1} + q_{n−2}` (and the same for `p`), seeded with
/// `q₋₂ = 1, q₋₁ = 0, p₋₂ = 0, p₋₁ = 1` and `a₀ = 0`.
///
/// `digits` holds `a₁, a₂, …`; panics if fewer than `n` are given.
pub fn convergents<T>(digits: &[T], n: usize) -> Vec<Convergent<T>>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + fmt::Display,
{
    assert!(n <= digits.len(), "need {n} partial quotients, have {}", digits.len());
    let mut out = Vec::with_capacity(n + 1);
    let (mut p2, mut p1) = (T::zero(), T::one());
    let (mut q2, mut q1) = (T::one(), T::zero());
    for k in 0..=n {
        let a = if k == 0 { T::zero() } else { digits[k - 1].clone() };
        let p = a.clone() * p1.clone() + p2;
        let q = a * q1.clone() + q2;
        out.push(Convergent { index: k, p: p.clone(), q: q.clone() });
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    out
}

/// `lo < α < hi`, bracketed by the convergents at `depth` and `depth + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaEnclosure {
    #[serde(serialize_with = "dec::rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "dec::rational")]
    pub hi: BigRational,
    pub depth: usize,
}

impl AlphaEnclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Encloses `c·α` for a rational multiplier of either sign.
    pub fn scale(&self, c: &BigRational) -> (BigRational, BigRational) {
        let a = c * &self.lo;
        let b = c * &self.hi;
        if c.is_negative() {
            (b, a)
        } else {
            (a, b)
        }
    }
}

pub fn alpha_enclosure(pq: &PartialQuotients, depth: usize) -> Result<AlphaEnclosure> {
    let conv = pq.convergents(depth + 1)?;
    Ok(enclosure_from(&conv, depth))
}

pub(crate) fn enclosure_from(conv: &[Convergent<BigUint>], depth: usize) -> AlphaEnclosure {
    let r = |c: &Convergent<BigUint>| BigRational::new(to_bigint(&c.p), to_bigint(&c.q));
    let (a, b) = (r(&conv[depth]), r(&conv[depth + 1]));
    // even-index convergents sit below α, odd ones above
    let (lo, hi) = if depth % 2 == 0 { (a, b) } else { (b, a) };
    AlphaEnclosure { lo, hi, depth }
}

/// A rational interval certified to contain a distance to the nearest integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormInterval {
    #[serde(serialize_with = "dec::rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "dec::rational")]
    pub hi: BigRational,
}

impl NormInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Image of `[x_lo, x_hi]` under `x ↦ ‖x‖`. The map is 1-Lipschitz, so the
/// result is no wider than the input.
pub fn norm_of_interval(x_lo: &BigRational, x_hi: &BigRational) -> NormInterval {
    let h = half();
    let fl = x_lo.floor();
    let fh = x_hi.floor();
    if fl == fh {
        let a = x_lo - &fl;
        let b = x_hi - &fl;
        let one = BigRational::one();
        if a >= h {
            NormInterval { lo: &one - &b, hi: &one - &a }
        } else if b <= h {
            NormInterval { lo: a, hi: b }
        } else {
            let lo = std::cmp::min(a, &one - &b);
            NormInterval { lo, hi: h }
        }
    } else if x_hi - x_lo >= BigRational::one() {
        NormInterval { lo: BigRational::zero(), hi: h }
    } else {
        let m = &fl + BigRational::one();
        let far = std::cmp::max(&m - x_lo, x_hi - &m);
        NormInterval { lo: BigRational::zero(), hi: std::cmp::min(far, h) }
    }
}

/// Certified interval for `‖kα‖`; its width is at most `k·(hi − lo)`.
pub fn norm_distance(k: &BigInt, enc: &AlphaEnclosure) -> NormInterval {
    let k = BigRational::from_integer(k.clone());
    let (lo, hi) = enc.scale(&k);
    norm_of_interval(&lo, &hi)
}

/// Certifies the best-approximation property
/// `‖q_{n−1}α‖ < ‖kα‖` for every `k < q_n`, `k ≠ q_{n−1}`.
///
/// Enclosures are deepened one convergent at a time up to `depth_cap`. A
/// certified counterexample yields `Ok(false)`; running out of depth is an
/// error, never a guess.
pub fn best_approx_check(pq: &PartialQuotients, n: usize, q_cap: u64, depth_cap: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidInput("best approximation needs n >= 1".into()));
    }
    let conv = pq.convergents(n)?;
    let q_n = conv[n].q.to_u64().filter(|q| *q <= q_cap).ok_or_else(|| Error::StepBudget {
        needed: conv[n].q.to_u128().unwrap_or(u128::MAX),
        budget: q_cap,
    })?;
    let q_prev = conv[n - 1].q.to_u64().expect("q_{n-1} < q_n fits");
    let mut pending: Vec<u64> = (1..q_n).filter(|&k| k != q_prev).collect();
    let mut depth = n;
    loop {
        if pending.is_empty() {
            return Ok(true);
        }
        if depth > depth_cap || depth + 1 > pq.len() {
            return Err(Error::Undecided {
                depth: depth.min(depth_cap),
                what: format!("{} multiples not separated from ‖q_{}α‖", pending.len(), n - 1),
            });
        }
        let enc = alpha_enclosure(pq, depth)?;
        let reference = norm_distance(&BigInt::from(q_prev), &enc);
        let mut violated = false;
        pending.retain(|&k| {
            let iv = norm_distance(&BigInt::from(k), &enc);
            if reference.hi < iv.lo {
                false
            } else if iv.hi < reference.lo {
                violated = true;
                false
            } else {
                true
            }
        });
        if violated {
            return Ok(false);
        }
        depth += 1;
    }
}
