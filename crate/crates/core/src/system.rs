//! A rotation number together with everything the walk machinery needs:
//! convergents, enclosures at every depth, a fixed-point image of α and
//! lazily built window tables.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cf::{enclosure_from, AlphaEnclosure, Convergent, DigitBudget, DigitRule, PartialQuotients, Tau};
use crate::error::{Error, Result};
use crate::ratio::ceil_u128;

/// Resource limits shared by every operation on a [`System`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    /// Deepest convergent pair used to certify a comparison.
    pub depth_cap: usize,
    pub digit_budget: DigitBudget,
    /// Largest number of walk steps a single request may cover.
    pub step_budget: u64,
    /// Largest breakpoint count for the exact recurrence sweep.
    pub sweep_cap: u64,
    /// Largest `q_n` for which a sorted window table is built.
    pub table_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            depth_cap: 64,
            digit_budget: DigitBudget::default(),
            step_budget: 1_000_000_000,
            sweep_cap: 10_000_000,
            table_cap: 1 << 20,
        }
    }
}

/// Windows shorter than this are streamed; a table lookup would not pay off.
const MIN_TABLE: u64 = 64;

/// `α·2^128` is known to lie in `[value, value + err]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedAlpha {
    pub value: u128,
    pub err: u128,
    pub depth: usize,
}

impl FixedAlpha {
    fn from_enclosure(enc: &AlphaEnclosure) -> Self {
        let scale = BigRational::from_integer(BigInt::one() << 128u32);
        let value = (&enc.lo * &scale).floor().to_integer().to_u128().unwrap_or(u128::MAX);
        let err = ceil_u128(&(enc.width() * scale)).saturating_add(1);
        FixedAlpha { value, err, depth: enc.depth }
    }
}

#[derive(Debug)]
pub struct System {
    pq: PartialQuotients,
    conv: Vec<Convergent<BigUint>>,
    enclosures: Vec<AlphaEnclosure>,
    // lower bound on log2(1/width) per depth
    width_bits: Vec<u64>,
    fixed: FixedAlpha,
    config: Config,
    tables: Vec<OnceLock<Vec<u128>>>,
    levels: Vec<(usize, u64)>,
}

impl Clone for System {
    fn clone(&self) -> Self {
        System {
            pq: self.pq.clone(),
            conv: self.conv.clone(),
            enclosures: self.enclosures.clone(),
            width_bits: self.width_bits.clone(),
            fixed: self.fixed,
            config: self.config.clone(),
            tables: self.tables.clone(),
            levels: self.levels.clone(),
        }
    }
}

impl System {
    /// Materializes digits up to `depth_cap + 2` (or as many as the rule and
    /// the digit budget allow) and precomputes all enclosures.
    pub fn new(mut pq: PartialQuotients, config: Config) -> Result<Self> {
        let target = config.depth_cap + 2;
        if !matches!(pq.rule, DigitRule::Explicit) {
            pq.extend_within_budget(target, config.digit_budget);
        }
        if pq.is_empty() {
            return Err(Error::InvalidInput("a rotation needs at least one partial quotient".into()));
        }
        let conv = pq.convergents(pq.len())?;
        let limit = BigUint::from(10u32).pow(config.digit_budget.max_decimal_digits);
        if let Some(c) = conv.iter().find(|c| c.q > limit) {
            return Err(Error::DigitBudget { index: c.index, max_digits: config.digit_budget.max_decimal_digits });
        }
        let enclosures: Vec<_> = (0..pq.len()).map(|d| enclosure_from(&conv, d)).collect();
        let width_bits = (0..pq.len())
            .map(|d| (conv[d].q.bits() + conv[d + 1].q.bits()).saturating_sub(2))
            .collect();
        let max_depth = config.depth_cap.min(pq.len() - 1);
        let fixed = FixedAlpha::from_enclosure(&enclosures[max_depth]);
        let tables = (0..conv.len()).map(|_| OnceLock::new()).collect();
        let levels = table_levels(&conv, config.table_cap);
        Ok(System { pq, conv, enclosures, width_bits, fixed, config, tables, levels })
    }

    pub fn for_tau(tau: Tau, config: Config) -> Result<Self> {
        let pq = crate::cf::quotients_for_dimension(tau, 1, config.digit_budget)?;
        Self::new(pq, config)
    }

    pub fn golden(config: Config) -> Result<Self> {
        Self::new(PartialQuotients::golden(1), config)
    }

    pub fn from_digits(digits: Vec<BigUint>, config: Config) -> Result<Self> {
        Self::new(PartialQuotients::explicit(digits)?, config)
    }

    pub fn staircase(taus: Vec<Tau>, config: Config) -> Result<Self> {
        let pq = PartialQuotients::staircase(taus, 1, config.digit_budget)?;
        Self::new(pq, config)
    }

    pub fn quotients(&self) -> &PartialQuotients {
        &self.pq
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn convergents(&self) -> &[Convergent<BigUint>] {
        &self.conv
    }

    /// Largest `n` with `q_n` known.
    pub fn max_index(&self) -> usize {
        self.conv.len() - 1
    }

    pub fn q(&self, n: usize) -> Result<&BigUint> {
        self.conv
            .get(n)
            .map(|c| &c.q)
            .ok_or(Error::DigitsExhausted { needed: n, available: self.max_index() })
    }

    pub fn p(&self, n: usize) -> Result<&BigUint> {
        self.conv
            .get(n)
            .map(|c| &c.p)
            .ok_or(Error::DigitsExhausted { needed: n, available: self.max_index() })
    }

    /// `q_n` as a machine integer, or a step budget error if it is too large
    /// to walk.
    pub fn q_steps(&self, n: usize) -> Result<u64> {
        let q = self.q(n)?;
        match q.to_u64() {
            Some(v) if v <= self.config.step_budget => Ok(v),
            _ => Err(Error::StepBudget { needed: q.to_u128().unwrap_or(u128::MAX), budget: self.config.step_budget }),
        }
    }

    pub fn check_steps(&self, needed: u128) -> Result<()> {
        if needed > self.config.step_budget as u128 {
            Err(Error::StepBudget { needed, budget: self.config.step_budget })
        } else {
            Ok(())
        }
    }

    pub fn max_depth(&self) -> usize {
        self.config.depth_cap.min(self.enclosures.len() - 1)
    }

    pub fn enclosure(&self, depth: usize) -> &AlphaEnclosure {
        &self.enclosures[depth.min(self.max_depth())]
    }

    pub fn deepest(&self) -> &AlphaEnclosure {
        self.enclosure(self.max_depth())
    }

    /// First depth whose enclosure is narrow enough that a multiplier of
    /// about `2^magnitude_bits` still leaves some 48 bits of separation.
    pub fn start_depth(&self, magnitude_bits: u64) -> usize {
        let need = magnitude_bits + 48;
        let max = self.max_depth();
        (0..=max).find(|&d| self.width_bits[d] >= need).unwrap_or(max)
    }

    pub fn fixed(&self) -> FixedAlpha {
        self.fixed
    }

    /// A float approximation of α for display only.
    pub fn alpha_f64(&self) -> f64 {
        let enc = self.deepest();
        ((&enc.lo + &enc.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// Indices `n` with a usable window table, largest `q_n` first.
    pub fn window_levels(&self) -> &[(usize, u64)] {
        &self.levels
    }

    /// Sorted `{jA mod 2^128 : 0 ≤ j < q_n}`, built on first use.
    pub fn table(&self, n: usize) -> &[u128] {
        self.tables[n].get_or_init(|| {
            let q = self.conv[n].q.to_u64().expect("table level fits u64");
            let a = self.fixed.value;
            let mut t: Vec<u128> = (0..q as u128).map(|j| j.wrapping_mul(a)).collect();
            t.sort_unstable();
            t
        })
    }
}

fn table_levels(conv: &[Convergent<BigUint>], cap: u64) -> Vec<(usize, u64)> {
    let mut out: Vec<(usize, u64)> = Vec::new();
    for (n, c) in conv.iter().enumerate().skip(1) {
        let Some(q) = c.q.to_u64() else { break };
        if q < MIN_TABLE || q > cap || out.last().is_some_and(|&(_, prev)| prev == q) {
            continue;
        }
        out.push((n, q));
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_half_system_has_expected_depth() {
        let sys = System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap();
        assert_eq!(sys.q(4).unwrap(), &BigUint::from(80_220_167u64));
        assert!(sys.max_index() >= 8);
        assert!(sys.fixed().err <= 2);
        // q_3 = 6333 gets a table, q_2 = 56 is streamed
        let levels = sys.window_levels();
        assert_eq!(levels, &[(3, 6333)]);
    }

    #[test]
    fn fixed_alpha_brackets_alpha() {
        let sys = System::golden(Config::default()).unwrap();
        let f = sys.fixed();
        let scale = BigRational::from_integer(BigInt::one() << 128u32);
        let enc = sys.deepest();
        let lo = BigRational::from_integer(f.value.into());
        let hi = BigRational::from_integer((f.value + f.err).into());
        assert!(lo <= &enc.lo * &scale && &enc.hi * &scale <= hi);
    }

    #[test]
    fn tables_are_sorted_multiples() {
        let sys = System::golden(Config::default()).unwrap();
        let (n, q) = sys.window_levels()[0];
        let t = sys.table(n);
        assert_eq!(t.len() as u64, q);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(t[0], 0);
    }

    #[test]
    fn explicit_digits_beyond_budget_are_rejected() {
        let cfg = Config { digit_budget: DigitBudget { max_decimal_digits: 3 }, ..Config::default() };
        let digits = vec![BigUint::from(5u32), BigUint::from(11u32), BigUint::from(113u32)];
        assert!(matches!(System::from_digits(digits, cfg), Err(Error::DigitBudget { .. })));
    }
}
