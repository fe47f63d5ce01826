//! The generating time set `F` and finite-stage sequence dimensions.

use num_bigint::BigUint;
use num_traits::{Float, ToPrimitive, Zero};
use serde::Serialize;

use crate::dec;
use crate::error::{Error, Result};
use crate::ratio::ln_biguint;
use crate::system::System;

/// One arithmetic block `{q_n, 2q_n, …, l_n q_n}` of `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub n: usize,
    #[serde(serialize_with = "dec::display")]
    pub q: BigUint,
    #[serde(serialize_with = "dec::display")]
    pub l: BigUint,
}

impl Block {
    pub fn last(&self) -> BigUint {
        &self.q * &self.l
    }

    /// The block's times, when they fit in machine integers.
    pub fn times(&self) -> Result<Vec<u64>> {
        let (q, l) = (small(&self.q, "q_n")?, small(&self.l, "l_n")?);
        q.checked_mul(l).ok_or_else(|| Error::OutOfRange { k: format!("l_{}q_{}", self.n, self.n), reason: "exceeds u64".into() })?;
        Ok((1..=l).map(|i| i * q).collect())
    }
}

fn small(v: &BigUint, what: &str) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::OutOfRange { k: what.into(), reason: "exceeds u64".into() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenSequence {
    pub n0: usize,
    /// `l_n` for `n = 1..=max_n`, including those before `n0`.
    #[serde(with = "dec::vec")]
    pub l: Vec<BigUint>,
    pub blocks: Vec<Block>,
}

/// `l_n = ⌊q_{n+1} / (12 q_n)⌋`.
pub fn block_length(sys: &System, n: usize) -> Result<BigUint> {
    let q = sys.q(n)?;
    let next = sys.q(n + 1)?;
    Ok(next / (q * 12u32))
}

/// Builds `F` over `n0..=max_n` with the smallest `n0` for which every
/// `l_n > 0` and each block outweighs all earlier ones together.
pub fn build_f(sys: &System, max_n: usize) -> Result<GenSequence> {
    if max_n == 0 {
        return Err(Error::InvalidInput("build_f needs max_n >= 1".into()));
    }
    let l: Vec<BigUint> = (1..=max_n).map(|n| block_length(sys, n)).collect::<Result<_>>()?;
    let mut failure = String::new();
    'scan: for n0 in 1..=max_n {
        let mut acc = BigUint::zero();
        for n in n0..=max_n {
            let ln = &l[n - 1];
            if ln.is_zero() {
                failure = format!("l_{n} = 0");
                continue 'scan;
            }
            if n > n0 && &acc >= ln {
                failure = format!("l_{n0} + ... + l_{} = {acc} >= l_{n} = {ln}", n - 1);
                continue 'scan;
            }
            acc += ln;
        }
        let blocks = (n0..=max_n).map(|n| Ok(Block { n, q: sys.q(n)?.clone(), l: l[n - 1].clone() })).collect::<Result<_>>()?;
        return Ok(GenSequence { n0, l, blocks });
    }
    Err(Error::NoValidStart { max_n, reason: failure })
}

/// One point `(index, s_index, log index / log s_index)` of a stage table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage<T> {
    #[serde(serialize_with = "dec::display")]
    pub index: BigUint,
    #[serde(serialize_with = "dec::display")]
    pub s: BigUint,
    pub value: T,
}

/// Stage values with tail extremes as `limsup` / `liminf` proxies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate<T> {
    pub stages: Vec<Stage<T>>,
    pub upper: T,
    pub lower: T,
    pub tail_fraction: T,
    /// Indices with `s = 1`, where the ratio is undefined.
    pub skipped: Vec<u64>,
}

fn estimate<T: Float>(stages: Vec<Stage<T>>, tail: T, skipped: Vec<u64>) -> Result<DimensionEstimate<T>> {
    if stages.len() < 2 {
        return Err(Error::DegenerateSequence(format!("{} usable stages, need 2", stages.len())));
    }
    if !(tail > T::zero() && tail <= T::one()) {
        return Err(Error::InvalidInput("tail fraction must lie in (0, 1]".into()));
    }
    let n = stages.len();
    let keep = (T::from(n).expect("usize fits") * tail).ceil().to_usize().unwrap_or(n).clamp(1, n);
    let tail_stages = &stages[n - keep..];
    let upper = tail_stages.iter().map(|s| s.value).fold(T::neg_infinity(), T::max);
    let lower = tail_stages.iter().map(|s| s.value).fold(T::infinity(), T::min);
    Ok(DimensionEstimate { stages, upper, lower, tail_fraction: tail, skipped })
}

/// `log n / log s_n` for the entries of `s` up to `horizon`.
pub fn sequence_dimension<T: Float>(s: &[u64], horizon: u64, tail: T) -> Result<DimensionEstimate<T>> {
    if let Some(w) = s.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateSequence(format!("not increasing at {} then {}", w[0], w[1])));
    }
    let mut stages = Vec::new();
    let mut skipped = Vec::new();
    for (i, &x) in s.iter().take_while(|&&x| x <= horizon).enumerate() {
        let index = i as u64 + 1;
        if x <= 1 {
            skipped.push(index);
            continue;
        }
        let v = T::from(index).expect("finite").ln() / T::from(x).expect("finite").ln();
        stages.push(Stage { index: index.into(), s: x.into(), value: v });
    }
    estimate(stages, tail, skipped)
}

impl GenSequence {
    /// Number of entries up to and including block `n`.
    pub fn count_through(&self, n: usize) -> BigUint {
        self.blocks.iter().filter(|b| b.n <= n).map(|b| b.l.clone()).sum()
    }

    /// Stage values at the first and last entry of every block.
    pub fn stages(&self) -> Vec<Stage<f64>> {
        let mut out = Vec::new();
        let mut before = BigUint::zero();
        for b in &self.blocks {
            let first = &before + 1u32;
            let last = &before + &b.l;
            for (index, s) in [(first, b.q.clone()), (last, b.last())] {
                if s > BigUint::from(1u32) && out.last().map(|x: &Stage<f64>| x.index != index).unwrap_or(true) {
                    let value = ln_biguint(&index) / ln_biguint(&s);
                    out.push(Stage { index, s, value });
                }
            }
            before += &b.l;
        }
        out
    }

    /// Stage value at the end of block `n`.
    pub fn block_end_value(&self, n: usize) -> Result<f64> {
        let b = self.blocks.iter().find(|b| b.n == n).ok_or_else(|| Error::InvalidInput(format!("F has no block {n}")))?;
        Ok(ln_biguint(&self.count_through(n)) / ln_biguint(&b.last()))
    }

    /// `log l_m / log(l_m q_m)`, the lower end of the bound chain at block `m`.
    pub fn block_floor_value(&self, n: usize) -> Result<f64> {
        let b = self.blocks.iter().find(|b| b.n == n).ok_or_else(|| Error::InvalidInput(format!("F has no block {n}")))?;
        Ok(ln_biguint(&b.l) / ln_biguint(&b.last()))
    }

    pub fn dimension(&self, tail: f64) -> Result<DimensionEstimate<f64>> {
        estimate(self.stages(), tail, Vec::new())
    }

    /// The first `count` entries of `F`.
    pub fn prefix(&self, count: usize) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(count);
        for b in &self.blocks {
            if out.len() >= count {
                break;
            }
            let q = small(&b.q, "q_n")?;
            let take = b.l.to_u64().unwrap_or(u64::MAX).min((count - out.len()) as u64);
            for i in 1..=take {
                out.push(q.checked_mul(i).ok_or_else(|| Error::OutOfRange { k: "F entry".into(), reason: "exceeds u64".into() })?);
            }
        }
        Ok(out)
    }

    pub fn block(&self, n: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.n == n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::system::Config;

    fn tau_half() -> System {
        System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap()
    }

    #[test]
    fn block_lengths_and_start() {
        let t = tau_half();
        let f = build_f(&t, 4).unwrap();
        let l: Vec<u64> = f.l.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(&l[..3], &[0, 9, 1055]);
        assert_eq!(l[3], 12870550467242278 / (12 * 80220167));
        assert_eq!(f.n0, 2);
        assert_eq!(f.blocks[0].times().unwrap(), (1..=9).map(|i| 56 * i).collect::<Vec<_>>());
    }

    #[test]
    fn golden_has_no_start() {
        let g = System::golden(Config::default()).unwrap();
        assert!(matches!(build_f(&g, 10), Err(Error::NoValidStart { .. })));
    }

    #[test]
    fn block_three_stage_value() {
        let f = build_f(&tau_half(), 4).unwrap();
        let v = f.block_end_value(3).unwrap();
        assert!((v - (1064f64).ln() / (6681315f64).ln()).abs() < 1e-12);
        let ends: Vec<f64> = (2..=4).map(|n| f.block_end_value(n).unwrap()).collect();
        assert!(ends.windows(2).all(|w| w[0] < w[1]), "{ends:?}");
        for n in 2..=4 {
            assert!(f.block_end_value(n).unwrap() >= f.block_floor_value(n).unwrap());
        }
        assert_eq!(f.prefix(11).unwrap()[9..], [6333, 12666]);
    }

    #[test]
    fn squares_and_identity() {
        let sq: Vec<u64> = (1..=1000u64).map(|n| n * n).collect();
        let d = sequence_dimension(&sq, 1_000_000, 0.5f64).unwrap();
        assert!((d.upper - 0.5).abs() < 1e-12 && (d.lower - 0.5).abs() < 1e-12);
        assert_eq!(d.skipped, vec![1]);
        let id: Vec<u64> = (1..=100).collect();
        let d = sequence_dimension(&id, 100, 0.5f32).unwrap();
        assert!(d.stages.iter().all(|s| (s.value - 1.0).abs() < 1e-6));
        assert!(sequence_dimension::<f64>(&[1], 10, 0.5).is_err());
        assert!(sequence_dimension::<f64>(&[3, 2], 10, 0.5).is_err());
    }
}
