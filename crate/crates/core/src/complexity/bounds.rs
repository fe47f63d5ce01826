//! Explicit upper bound on the log cover number at time `k`.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rotation::verify::global_extreme_bound;
use crate::system::System;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: u64,
    /// `n` with `q_n < k ≤ q_{n+1}`.
    pub n: usize,
    /// Bound on `max(M(k), −m(k))`.
    pub extreme: u64,
    /// Bound on `M(k) − m(k) + 1`.
    pub window: u64,
    /// `ln(2k) + ln(2(k+1))` for the rotation-coding factors.
    pub base_terms: f64,
    pub bound: f64,
    /// `bound / k^exponent`.
    pub ratio: f64,
}

/// Index `n` with `q_n < k ≤ q_{n+1}`.
pub fn bracket_index(sys: &System, k: u64) -> Result<usize> {
    for n in 1..sys.max_index() {
        let lo = sys.q(n)?.to_u64();
        let hi = sys.q(n + 1)?.to_u64();
        match (lo, hi) {
            (Some(lo), _) if k <= lo => break,
            (Some(_), None) => return Ok(n),
            (Some(_), Some(hi)) if k <= hi => return Ok(n),
            _ => {}
        }
    }
    Err(Error::OutOfRange { k: k.to_string(), reason: "needs q_n < k <= q_{n+1} for some n >= 1".into() })
}

/// `ln(2k) + ln(2(k+1)) + (M̄−m̄+1)·ln N(V)` at each `k`, with the walk
/// window bounded by the global extreme bound on both sides.
pub fn upper_bound_profile(sys: &System, ks: &[u64], cover_size: u64, exponent: f64) -> Result<Vec<BoundRow>> {
    if cover_size == 0 {
        return Err(Error::InvalidInput("cover size must be >= 1".into()));
    }
    let log_cover = (cover_size as f64).ln();
    ks.iter()
        .map(|&k| {
            let n = bracket_index(sys, k)?;
            let extreme = global_extreme_bound(sys, n, k)?;
            let window = 2 * extreme + 1;
            let kf = k as f64;
            let base_terms = (2.0 * kf).ln() + (2.0 * (kf + 1.0)).ln();
            let bound = base_terms + window as f64 * log_cover;
            Ok(BoundRow { k, n, extreme, window, base_terms, bound, ratio: bound / kf.powf(exponent) })
        })
        .collect()
}

/// Whether `bound / k^t` is nonincreasing along the rows.
pub fn nonincreasing_at(rows: &[BoundRow], t: f64) -> bool {
    rows.windows(2).all(|w| w[1].bound / (w[1].k as f64).powf(t) <= w[0].bound / (w[0].k as f64).powf(t))
}

/// Smallest `t` making consecutive ratios nonincreasing, per adjacent pair.
pub fn pair_thresholds(rows: &[BoundRow]) -> Vec<f64> {
    rows.windows(2).map(|w| (w[1].bound / w[0].bound).ln() / (w[1].k as f64 / w[0].k as f64).ln()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::rotation::verify::global_bound_constant;
    use crate::system::Config;

    fn tau_half() -> System {
        System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap()
    }

    #[test]
    fn trivial_cover_leaves_base_terms() {
        let t = tau_half();
        let rows = upper_bound_profile(&t, &[56, 6333], 1, 0.5).unwrap();
        for r in &rows {
            assert_eq!(r.bound, r.base_terms);
        }
    }

    #[test]
    fn window_at_q3_by_hand() {
        let t = tau_half();
        let r = &upper_bound_profile(&t, &[6333], 2, 0.6).unwrap()[0];
        assert_eq!(r.n, 2);
        // q_1 + 3⌈6333/56⌉ + 3⌈56/5⌉ + 2
        let m = 5 + 3 * 114 + 3 * 12 + 2;
        assert_eq!(r.extreme, m);
        assert_eq!(r.window, 2 * m + 1);
        assert_eq!(global_bound_constant(&t, 2).unwrap() + 3 * 114, m);
    }

    #[test]
    fn ratio_over_k_decreases() {
        let t = tau_half();
        let rows = upper_bound_profile(&t, &[56, 6333, 80220167], 2, 1.0).unwrap();
        assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio));
        let th = pair_thresholds(&rows);
        assert!(th.iter().all(|&x| x < 0.5), "{th:?}");
        assert!(nonincreasing_at(&rows, 0.5));
        assert!(!nonincreasing_at(&rows, 0.4));
    }

    #[test]
    fn out_of_range_k() {
        let t = tau_half();
        assert!(bracket_index(&t, 3).is_err());
        assert_eq!(bracket_index(&t, 6).unwrap(), 1);
        assert_eq!(bracket_index(&t, 56).unwrap(), 1);
        assert_eq!(bracket_index(&t, 57).unwrap(), 2);
    }
}
