//! The deterministic walk in random scenery: the rotation coding moves a
//! walker on `ℤ`, and a seeded labelling of `ℤ` is read along the way.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::{Angle, Orbit};
use crate::system::System;

/// Two-set labelling of `ℤ`; `true` stands for `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneryModel {
    /// I.i.d. labels with `P(A) = num/den`, generated per index.
    Bernoulli { seed: u64, num: u64, den: u64 },
    Constant { label: bool },
    /// `labels[i]` at index `offset + i`, `A^c` elsewhere.
    Table { offset: i64, labels: Vec<bool> },
}

impl SceneryModel {
    pub fn bernoulli(seed: u64, num: u64, den: u64) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::InvalidInput(format!("bias {num}/{den} must lie in (0, 1)")));
        }
        Ok(SceneryModel::Bernoulli { seed, num, den })
    }

    pub fn fair(seed: u64) -> Self {
        SceneryModel::Bernoulli { seed, num: 1, den: 2 }
    }

    /// The label at `index`; a pure function of the model and the index.
    pub fn label(&self, index: i64) -> bool {
        match self {
            SceneryModel::Bernoulli { seed, num, den } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(index as u64);
                (rng.next_u64() as u128) * (*den as u128) < (*num as u128) << 64
            }
            SceneryModel::Constant { label } => *label,
            SceneryModel::Table { offset, labels } => {
                let i = index.checked_sub(*offset).filter(|i| *i >= 0);
                i.and_then(|i| labels.get(i as usize)).copied().unwrap_or(false)
            }
        }
    }

    /// Same model with every index shifted by `by`.
    pub fn shifted(&self, by: i64) -> ShiftedScenery<'_> {
        ShiftedScenery { inner: self, by }
    }
}

/// View of a scenery at `index + by`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedScenery<'a> {
    inner: &'a SceneryModel,
    by: i64,
}

impl ShiftedScenery<'_> {
    pub fn label(&self, index: i64) -> bool {
        self.inner.label(index + self.by)
    }
}

/// Position of the skew product after `time` steps from `(θ, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DwrsState {
    pub base: Angle,
    pub time: u64,
    pub displacement: i64,
}

impl DwrsState {
    pub fn start(theta: Angle) -> Self {
        DwrsState { base: theta, time: 0, displacement: 0 }
    }

    /// One step: the walker moves by the symbol at offset `time`.
    pub fn step(&self, sys: &System) -> Result<DwrsState> {
        let z = Orbit::new(sys, &self.base).symbol(self.time as i64)?;
        Ok(DwrsState { base: self.base.clone(), time: self.time + 1, displacement: self.displacement + z as i64 })
    }
}

/// `ω(θ, 0, i−1)`, the walker's position at time `i`.
pub fn displacement(sys: &System, theta: &Angle, i: u64) -> Result<i64> {
    if i == 0 {
        return Ok(0);
    }
    sys.check_steps(i as u128)?;
    Orbit::new(sys, theta).sum(0, i as i64 - 1)
}

/// Labels read at a strictly increasing list of times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LabelWord {
    pub times: Vec<u64>,
    bits: Vec<u64>,
}

impl LabelWord {
    pub fn new(times: Vec<u64>, labels: &[bool]) -> Result<Self> {
        if times.len() != labels.len() {
            return Err(Error::InvalidInput("times and labels differ in length".into()));
        }
        check_increasing(&times)?;
        let mut bits = vec![0u64; labels.len().div_ceil(64)];
        for (i, &l) in labels.iter().enumerate() {
            if l {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(LabelWord { times, bits })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn label(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn labels(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    /// The packed labels; equal words over the same times have equal bits.
    pub fn bits(&self) -> &[u64] {
        &self.bits
    }
}

fn check_increasing(times: &[u64]) -> Result<()> {
    if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!("times must be strictly increasing: {} then {}", w[0], w[1])));
    }
    Ok(())
}

/// Walker positions at each time, accumulated forward without restarting.
pub fn displacements_at(sys: &System, theta: &Angle, times: &[u64]) -> Result<Vec<i64>> {
    check_increasing(times)?;
    let Some(&last) = times.last() else { return Ok(Vec::new()) };
    sys.check_steps(last as u128)?;
    let orbit = Orbit::new(sys, theta);
    let mut out = Vec::with_capacity(times.len());
    let (mut at, mut pos) = (0u64, 0i64);
    for &t in times {
        if t > at {
            pos += orbit.sum(at as i64, t as i64 - 1)?;
            at = t;
        }
        out.push(pos);
    }
    Ok(out)
}

/// The scenery labels under the walker at `times`.
pub fn coding(sys: &System, theta: &Angle, scenery: &SceneryModel, times: &[u64]) -> Result<LabelWord> {
    let d = displacements_at(sys, theta, times)?;
    let labels: Vec<bool> = d.iter().map(|&x| scenery.label(x)).collect();
    LabelWord::new(times.to_vec(), &labels)
}

/// One row of a coding dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodingRow {
    pub sample_id: usize,
    pub time: u64,
    pub displacement: i64,
    pub label: char,
}

pub fn coding_rows(sys: &System, sample_id: usize, theta: &Angle, scenery: &SceneryModel, times: &[u64]) -> Result<Vec<CodingRow>> {
    let d = displacements_at(sys, theta, times)?;
    Ok(times
        .iter()
        .zip(d)
        .map(|(&time, displacement)| CodingRow {
            sample_id,
            time,
            displacement,
            label: if scenery.label(displacement) { 'A' } else { 'a' },
        })
        .collect())
}

/// Smallest and largest walker position over times `0..=n` and all angles.
pub fn displacement_range(sys: &System, thetas: &[Angle], n: u64) -> Result<(i64, i64)> {
    sys.check_steps(n as u128)?;
    let ranges: Vec<(i64, i64)> = thetas
        .par_iter()
        .map(|t| {
            let (mut pos, mut lo, mut hi) = (0i64, 0i64, 0i64);
            if n > 0 {
                Orbit::new(sys, t).stream(0, n as i64 - 1, |_, z| {
                    pos += z as i64;
                    lo = lo.min(pos);
                    hi = hi.max(pos);
                })?;
            }
            Ok((lo, hi))
        })
        .collect::<Result<_>>()?;
    Ok(ranges.into_iter().fold((0, 0), |(a, b), (c, d)| (a.min(c), b.max(d))))
}
