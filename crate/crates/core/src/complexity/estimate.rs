//! Two-sided finite-stage evidence for the entropy dimension: a lower
//! estimate from the growth of word counts along `F`, and an upper envelope
//! from the explicit cover bound.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::complexity::bounds::{nonincreasing_at, pair_thresholds, upper_bound_profile, BoundRow};
use crate::complexity::sequence::{build_f, sequence_dimension, DimensionEstimate};
use crate::complexity::words::{sample_words, SampleSpec, WordTable};
use crate::error::{Error, Result};
use crate::system::System;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    /// Required growth of `log N̂` per index, as a fraction of `log 2`.
    pub rate_fraction: f64,
    pub grid_step: f64,
    /// `N(V)` in the cover bound.
    pub cover_size: u64,
    /// Hard cap on the number of `F` entries examined.
    pub max_prefix: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { rate_fraction: 1.0 / 40.0, grid_step: 0.05, cover_size: 2, max_prefix: 5000 }
    }
}

/// Distinct-word count along one prefix length of `F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub k: usize,
    pub time: u64,
    pub distinct: usize,
    /// `log N̂(k) / (k log 2)`
    pub rate: f64,
    pub stage_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerEstimate {
    /// Longest prefix of `F` on which the growth criterion holds throughout.
    pub prefix: usize,
    /// Entries examined: limited by `F`, the step budget, and the largest `k`
    /// for which `samples` can witness the required growth.
    pub examined: usize,
    pub sample_ceiling: usize,
    pub value: f64,
    pub growth: Vec<GrowthPoint>,
    pub dimension: Option<DimensionEstimate<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperEnvelope {
    pub rows: Vec<BoundRow>,
    pub thresholds: Vec<f64>,
    /// Smallest grid exponent making the ratios nonincreasing.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionBracket {
    pub max_n: usize,
    pub n0: Option<usize>,
    pub lower: Option<LowerEstimate>,
    pub upper: Option<UpperEnvelope>,
    pub config: EstimateConfig,
    pub notes: Vec<String>,
}

impl DimensionBracket {
    pub fn contains(&self, t: f64) -> bool {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => u.value.is_some_and(|v| l.value <= t && t <= v),
            _ => false,
        }
    }
}

fn lower_estimate(sys: &System, max_n: usize, spec: &SampleSpec, cfg: &EstimateConfig, notes: &mut Vec<String>) -> Result<(usize, LowerEstimate)> {
    let f = build_f(sys, max_n)?;
    let rate = cfg.rate_fraction * std::f64::consts::LN_2;
    let sample_ceiling = if spec.samples > 1 { ((spec.samples as f64).ln() / rate).floor() as usize } else { 0 };
    let total: usize = f.blocks.iter().map(|b| b.l.to_usize().unwrap_or(usize::MAX)).fold(0, usize::saturating_add);
    let budget = sys.config().step_budget;
    let mut times = f.prefix(total.min(sample_ceiling).min(cfg.max_prefix))?;
    times.retain(|&t| t <= budget);
    if times.len() < total.min(cfg.max_prefix) {
        notes.push(format!(
            "lower estimate examines {} of {} F entries (sample ceiling {sample_ceiling}, step budget {budget})",
            times.len(),
            total
        ));
    }

    let words = sample_words(sys, &times, spec)?;
    let table = WordTable::new(&words)?;
    let mut growth = Vec::with_capacity(times.len());
    let mut prefix = 0;
    let mut holding = true;
    for (i, &t) in times.iter().enumerate() {
        let k = i + 1;
        let distinct = table.distinct(k);
        let r = (distinct as f64).ln() / (k as f64 * std::f64::consts::LN_2);
        let stage_value = if t > 1 { (k as f64).ln() / (t as f64).ln() } else { 0.0 };
        holding &= r >= cfg.rate_fraction;
        if holding {
            prefix = k;
        }
        growth.push(GrowthPoint { k, time: t, distinct, rate: r, stage_value });
    }
    let value = if prefix == 0 { 0.0 } else { growth[prefix - 1].stage_value };
    let dimension = if prefix >= 2 { sequence_dimension(&times[..prefix], u64::MAX, 0.5).ok() } else { None };
    Ok((f.n0, LowerEstimate { prefix, examined: times.len(), sample_ceiling, value, growth, dimension }))
}

fn upper_envelope(sys: &System, max_n: usize, cfg: &EstimateConfig) -> Result<UpperEnvelope> {
    let mut ks = Vec::new();
    for n in 2..=max_n + 1 {
        match sys.q(n).ok().and_then(|q| q.to_u64()) {
            Some(k) => ks.push(k),
            None => break,
        }
    }
    let rows = upper_bound_profile(sys, &ks, cfg.cover_size, 1.0)?;
    let thresholds = pair_thresholds(&rows);
    let steps = (1.0 / cfg.grid_step).round() as usize;
    let value = if rows.len() < 2 {
        None
    } else {
        (1..=steps).map(|i| i as f64 * cfg.grid_step).find(|&t| nonincreasing_at(&rows, t))
    };
    Ok(UpperEnvelope { rows, thresholds, value })
}

/// Lower estimate along `F` through block `max_n` and the upper envelope
/// at `k = q_2, …, q_{max_n+1}`. Each side is reported with its stage data;
/// an error is returned only when neither side can be evaluated.
pub fn estimate_entropy_dimension(sys: &System, max_n: usize, spec: &SampleSpec, cfg: &EstimateConfig) -> Result<DimensionBracket> {
    let mut notes = Vec::new();
    let (n0, lower) = match lower_estimate(sys, max_n, spec, cfg, &mut notes) {
        Ok((n0, l)) => (Some(n0), Some(l)),
        Err(e) => {
            notes.push(format!("lower estimate unavailable: {e}"));
            (None, None)
        }
    };
    let upper = match upper_envelope(sys, max_n, cfg) {
        Ok(u) if u.rows.len() >= 2 => Some(u),
        Ok(_) => {
            notes.push("upper envelope needs at least two stages".into());
            None
        }
        Err(e) => {
            notes.push(format!("upper envelope unavailable: {e}"));
            None
        }
    };
    if let Some(u) = &upper {
        if u.value.is_none() {
            notes.push("no grid exponent up to 1 makes the bound ratios nonincreasing".into());
        }
        notes.push(format!("stage ceiling k = {}", u.rows.last().map(|r| r.k).unwrap_or(0)));
    }
    notes.push("the growth criterion is a finite-stage proxy for a liminf condition".into());
    if lower.is_none() && upper.is_none() {
        return Err(Error::Inconclusive(notes.join("; ")));
    }
    Ok(DimensionBracket { max_n, n0, lower, upper, config: cfg.clone(), notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::system::Config;

    #[test]
    fn constant_scenery_gives_zero() {
        let t = System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap();
        let b = estimate_entropy_dimension(&t, 3, &SampleSpec::constant(500, 1, false), &EstimateConfig::default()).unwrap();
        let l = b.lower.unwrap();
        assert_eq!(l.prefix, 0);
        assert_eq!(l.value, 0.0);
    }

    #[test]
    fn upper_envelope_for_tau_half() {
        let t = System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap();
        let u = upper_envelope(&t, 3, &EstimateConfig::default()).unwrap();
        assert_eq!(u.rows.len(), 3);
        assert_eq!(u.value, Some(0.5));
    }

    #[test]
    fn golden_has_no_lower_side() {
        let g = System::golden(Config::default()).unwrap();
        let b = estimate_entropy_dimension(&g, 6, &SampleSpec::fair(50, 1), &EstimateConfig::default()).unwrap();
        assert!(b.lower.is_none());
        assert!(!b.contains(0.5));
    }
}
