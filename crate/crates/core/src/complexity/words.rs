//! Distinct label words and plug-in entropy along a time set, and factor
//! counts of the rotation coding itself.

use std::collections::HashSet;

use num_traits::Float;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::{Angle, Orbit};
use crate::sampling::{random_theta, rng_for};
use crate::scenery::{coding, LabelWord, SceneryModel};
use crate::system::System;

/// How each sample's scenery is drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneryLaw {
    Bernoulli { num: u64, den: u64 },
    Constant { label: bool },
}

/// Uniform rational θ and an independent scenery per sample, all derived
/// from `(seed, sample index)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub samples: usize,
    pub seed: u64,
    pub scenery: SceneryLaw,
}

impl SampleSpec {
    pub fn fair(samples: usize, seed: u64) -> Self {
        SampleSpec { samples, seed, scenery: SceneryLaw::Bernoulli { num: 1, den: 2 } }
    }

    pub fn constant(samples: usize, seed: u64, label: bool) -> Self {
        SampleSpec { samples, seed, scenery: SceneryLaw::Constant { label } }
    }

    pub fn draw(&self, i: usize) -> Result<(Angle, SceneryModel)> {
        let mut rng = rng_for(self.seed, i as u64);
        let theta = random_theta(&mut rng);
        let scenery_seed = rng.next_u64();
        let scenery = match self.scenery {
            SceneryLaw::Bernoulli { num, den } => SceneryModel::bernoulli(scenery_seed, num, den)?,
            SceneryLaw::Constant { label } => SceneryModel::Constant { label },
        };
        Ok((theta, scenery))
    }
}

/// One word per sample, in sample order.
pub fn sample_words(sys: &System, times: &[u64], spec: &SampleSpec) -> Result<Vec<LabelWord>> {
    if let Some(&last) = times.last() {
        sys.check_steps(last as u128)?;
    }
    (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let (theta, scenery) = spec.draw(i)?;
            coding(sys, &theta, &scenery, times)
        })
        .collect()
}

/// Words sorted lexicographically, with longest common prefixes of
/// neighbours, so every prefix length can be counted in one pass.
#[derive(Clone, Debug)]
pub struct WordTable {
    len: usize,
    lcp: Vec<usize>,
}

fn msb_first(w: &LabelWord) -> Vec<u64> {
    w.bits().iter().map(|b| b.reverse_bits()).collect()
}

fn common_prefix(a: &[u64], b: &[u64], len: usize) -> usize {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            return (64 * i + (x ^ y).leading_zeros() as usize).min(len);
        }
    }
    len
}

impl WordTable {
    pub fn new(words: &[LabelWord]) -> Result<Self> {
        let len = words.first().map(LabelWord::len).unwrap_or(0);
        if words.iter().any(|w| w.len() != len) {
            return Err(Error::InvalidInput("words differ in length".into()));
        }
        let mut keys: Vec<Vec<u64>> = words.par_iter().map(msb_first).collect();
        keys.par_sort_unstable();
        let lcp = keys.windows(2).map(|w| common_prefix(&w[0], &w[1], len)).collect();
        Ok(WordTable { len, lcp })
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    /// Distinct words among the first `k` labels.
    pub fn distinct(&self, k: usize) -> usize {
        1 + self.lcp.iter().filter(|&&l| l < k).count()
    }

    /// Sizes of the groups of words agreeing on the first `k` labels.
    pub fn class_sizes(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut run = 1usize;
        for &l in &self.lcp {
            if l < k {
                out.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        out.push(run);
        out
    }
}

/// `ln S − (1/S) Σ c ln c` in nats.
pub fn plug_in_entropy<T: Float>(counts: &[usize]) -> T {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return T::zero();
    }
    let s = T::from(total).expect("finite");
    let acc = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = T::from(c).expect("finite");
            c * c.ln()
        })
        .fold(T::zero(), |a, b| a + b);
    (s.ln() - acc / s).max(T::zero())
}

/// Distinct-word count and plug-in entropy over the first `k` times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityEntry {
    pub k: usize,
    pub last_time: Option<u64>,
    pub samples: usize,
    /// Distinct realized words: a lower bound for the cover number.
    pub distinct: usize,
    pub log_distinct: f64,
    pub entropy: f64,
    /// `false` when `distinct / samples > 0.1` and the plug-in value is biased low.
    pub reliable: bool,
}

fn entry(table: &WordTable, times: &[u64], k: usize, samples: usize) -> ComplexityEntry {
    if samples == 0 {
        return ComplexityEntry { k, last_time: None, samples, distinct: 0, log_distinct: 0.0, entropy: 0.0, reliable: false };
    }
    let sizes = table.class_sizes(k);
    let distinct = sizes.len();
    ComplexityEntry {
        k,
        last_time: k.checked_sub(1).map(|i| times[i]),
        samples,
        distinct,
        log_distinct: (distinct as f64).ln(),
        entropy: plug_in_entropy(&sizes),
        reliable: (distinct as f64) / (samples as f64) <= 0.1,
    }
}

/// Entries for each prefix length in `stages`, from a single set of words
/// over the longest prefix.
pub fn complexity_profile(sys: &System, times: &[u64], stages: &[usize], spec: &SampleSpec) -> Result<Vec<ComplexityEntry>> {
    let longest = stages.iter().copied().max().unwrap_or(0);
    if longest > times.len() {
        return Err(Error::InvalidInput(format!("stage {longest} exceeds the {} times given", times.len())));
    }
    let words = sample_words(sys, &times[..longest], spec)?;
    let table = WordTable::new(&words)?;
    Ok(stages.iter().map(|&k| entry(&table, times, k, spec.samples)).collect())
}

/// Distinct words over all of `times`.
pub fn word_complexity(sys: &System, times: &[u64], spec: &SampleSpec) -> Result<ComplexityEntry> {
    Ok(complexity_profile(sys, times, &[times.len()], spec)?.remove(0))
}

/// Plug-in entropy estimate with its sample size and reliability flag.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub nats: f64,
    pub samples: usize,
    pub distinct: usize,
    pub reliable: bool,
}

pub fn empirical_entropy(sys: &System, times: &[u64], spec: &SampleSpec) -> Result<EntropyEstimate> {
    let e = word_complexity(sys, times, spec)?;
    Ok(EntropyEstimate { nats: e.entropy, samples: e.samples, distinct: e.distinct, reliable: e.reliable })
}

/// Distinct length-`k` factors of `z(0)` over offsets `0..horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorCount {
    pub k: usize,
    pub horizon: u64,
    pub count: usize,
    /// Count over the first half of the window; equal to `count` when no
    /// factor first appears late.
    pub half_window_count: usize,
    pub stable: bool,
    /// Factor complexity of a half-circle rotation coding, `2k`.
    pub reference: usize,
}

pub fn sturmian_complexity(sys: &System, k: usize, horizon: u64) -> Result<FactorCount> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidInput(format!("factor length must be in 1..=64, got {k}")));
    }
    if horizon < 2 * k as u64 {
        return Err(Error::HorizonTooSmall { k, horizon });
    }
    sys.check_steps(horizon as u128)?;
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let half = horizon / 2;
    let mut seen = HashSet::new();
    let mut half_count = 0;
    let mut window = 0u64;
    Orbit::new(sys, &Angle::zero()).stream(0, horizon as i64 - 1, |i, z| {
        window = (window << 1 | (z > 0) as u64) & mask;
        let end = i as u64 + 1;
        if end >= k as u64 {
            seen.insert(window);
        }
        if end == half {
            half_count = seen.len();
        }
    })?;
    Ok(FactorCount {
        k,
        horizon,
        count: seen.len(),
        half_window_count: half_count,
        stable: half_count == seen.len(),
        reference: 2 * k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::system::Config;

    fn tau_half() -> System {
        System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap()
    }

    fn word(bits: &[u8]) -> LabelWord {
        let times: Vec<u64> = (0..bits.len() as u64).collect();
        LabelWord::new(times, &bits.iter().map(|&b| b == 1).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn word_table_counts_prefixes() {
        let ws = vec![word(&[0, 1, 1]), word(&[0, 1, 0]), word(&[1, 1, 1]), word(&[0, 1, 1])];
        let t = WordTable::new(&ws).unwrap();
        assert_eq!(t.distinct(0), 1);
        assert_eq!(t.distinct(1), 2);
        assert_eq!(t.distinct(2), 2);
        assert_eq!(t.distinct(3), 3);
        let mut sizes = t.class_sizes(3);
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn long_words_compare_across_limbs() {
        let mut a = vec![0u8; 130];
        let mut b = a.clone();
        b[100] = 1;
        a[129] = 1;
        let t = WordTable::new(&[word(&a), word(&b)]).unwrap();
        assert_eq!(t.distinct(100), 1);
        assert_eq!(t.distinct(101), 2);
    }

    #[test]
    fn entropy_examples() {
        assert!(plug_in_entropy::<f64>(&[5]).abs() < 1e-15);
        assert!((plug_in_entropy::<f64>(&[3, 3]) - 2f64.ln()).abs() < 1e-12);
        assert!((plug_in_entropy::<f32>(&[1, 1, 1, 1]) - 4f32.ln()).abs() < 1e-6);
    }

    #[test]
    fn trivial_time_sets() {
        let t = tau_half();
        let spec = SampleSpec::fair(200, 3);
        let e = word_complexity(&t, &[], &spec).unwrap();
        assert_eq!(e.distinct, 1);
        let one = empirical_entropy(&t, &[7], &SampleSpec::fair(4000, 3)).unwrap();
        assert!((one.nats - 2f64.ln()).abs() < 0.01, "{one:?}");
        let c = word_complexity(&t, &[1, 5, 56], &SampleSpec::constant(300, 1, true)).unwrap();
        assert_eq!(c.distinct, 1);
        assert_eq!(c.entropy, 0.0);
    }

    #[test]
    fn profile_is_monotone() {
        let t = tau_half();
        let times: Vec<u64> = (1..=12).map(|i| i * 6333).collect();
        let p = complexity_profile(&t, &times, &[1, 4, 8, 12], &SampleSpec::fair(2000, 9)).unwrap();
        assert!(p.windows(2).all(|w| w[0].distinct <= w[1].distinct));
        assert!(p.iter().all(|e| e.entropy <= e.log_distinct + 1e-12 && e.entropy >= 0.0));
    }

    #[test]
    fn factor_counts_by_enumeration() {
        let g = System::golden(Config::default()).unwrap();
        let a = g.alpha_f64();
        let z: Vec<u8> = (0..10_000).map(|i| ((i as f64 * a).fract() < 0.5) as u8).collect();
        let mut oracle = HashSet::new();
        for w in z.windows(3) {
            oracle.insert(w.to_vec());
        }
        let f = sturmian_complexity(&g, 3, 10_000).unwrap();
        assert_eq!(f.count, oracle.len());
        assert_eq!(sturmian_complexity(&g, 1, 100).unwrap().count, 2);
        assert!(matches!(sturmian_complexity(&g, 5, 6), Err(Error::HorizonTooSmall { .. })));
    }
}
