//! Finite unions of half-open circle arcs with exact endpoints.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dec;
use crate::error::Result;
use crate::rotation::angle::{Angle, Linear};
use crate::system::System;

/// The arc `[start, end)` traversed counterclockwise; `start == end` is
/// not allowed (use [`IntervalSet::full`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    pub fn new(start: Angle, end: Angle) -> Self {
        Arc { start, end }
    }

    /// Arc length as an exact linear form in `(0, 1]`.
    pub fn length(&self, sys: &System) -> Result<Linear> {
        let d = self.end.linear().sub(&self.start.linear());
        let v = d.frac(sys)?;
        if v.sign(sys)? == Ordering::Equal {
            return Ok(Linear::rational(BigRational::one()));
        }
        Ok(v)
    }

    /// Whether `θ ∈ [start, end)`.
    pub fn contains(&self, theta: &Angle, sys: &System) -> Result<bool> {
        let offset = theta.linear().sub(&self.start.linear()).frac(sys)?;
        Ok(offset.cmp(&self.length(sys)?, sys)? == Ordering::Less)
    }
}

/// Disjoint arcs plus certified bounds on the measure of their union.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalSet {
    pub full: bool,
    pub arcs: Vec<Arc>,
    #[serde(skip)]
    pub measure: Linear,
    #[serde(serialize_with = "dec::rational")]
    pub measure_lo: BigRational,
    #[serde(serialize_with = "dec::rational")]
    pub measure_hi: BigRational,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet {
            full: false,
            arcs: Vec::new(),
            measure: Linear::zero(),
            measure_lo: BigRational::zero(),
            measure_hi: BigRational::zero(),
        }
    }

    pub fn full() -> Self {
        IntervalSet {
            full: true,
            arcs: Vec::new(),
            measure: Linear::rational(BigRational::one()),
            measure_lo: BigRational::one(),
            measure_hi: BigRational::one(),
        }
    }

    /// Builds the set from arcs the caller guarantees to be disjoint.
    pub fn from_disjoint(arcs: Vec<Arc>, sys: &System) -> Result<Self> {
        let mut measure = Linear::zero();
        for a in &arcs {
            measure = measure.add(&a.length(sys)?);
        }
        Ok(Self::with_measure(arcs, measure, sys))
    }

    /// As [`from_disjoint`](Self::from_disjoint) with the measure supplied.
    pub fn with_measure(arcs: Vec<Arc>, measure: Linear, sys: &System) -> Self {
        let (measure_lo, measure_hi) = if measure.is_rational() {
            (measure.r.clone(), measure.r.clone())
        } else {
            measure.enclose_at(sys, sys.max_depth())
        };
        IntervalSet { full: false, arcs, measure, measure_lo, measure_hi }
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn contains(&self, theta: &Angle, sys: &System) -> Result<bool> {
        if self.full {
            return Ok(true);
        }
        for a in &self.arcs {
            if a.contains(theta, sys)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether `arc` lies inside a single arc of this set.
    pub fn contains_arc(&self, arc: &Arc, sys: &System) -> Result<bool> {
        if self.full {
            return Ok(true);
        }
        let len = arc.length(sys)?;
        for a in &self.arcs {
            if !a.contains(&arc.start, sys)? {
                continue;
            }
            let offset = arc.start.linear().sub(&a.start.linear()).frac(sys)?;
            let reach = offset.add(&len);
            return Ok(reach.cmp(&a.length(sys)?, sys)? != Ordering::Greater);
        }
        Ok(false)
    }

    /// Certified `measure ≥ bound`.
    pub fn measure_at_least(&self, bound: &BigRational) -> bool {
        &self.measure_lo >= bound
    }

    pub fn measure_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.measure_lo + &self.measure_hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_rational;
    use crate::system::Config;

    fn a(s: &str) -> Angle {
        Angle::rational(parse_rational(s).unwrap())
    }

    #[test]
    fn wrapping_arc_membership_and_length() {
        let sys = System::golden(Config::default()).unwrap();
        let arc = Arc::new(a("3/4"), a("1/4"));
        assert_eq!(arc.length(&sys).unwrap().r, parse_rational("1/2").unwrap());
        assert!(arc.contains(&a("0"), &sys).unwrap());
        assert!(arc.contains(&a("3/4"), &sys).unwrap());
        assert!(!arc.contains(&a("1/4"), &sys).unwrap());
        assert!(!arc.contains(&a("1/2"), &sys).unwrap());
    }

    #[test]
    fn arcs_with_alpha_endpoints() {
        let sys = System::golden(Config::default()).unwrap();
        // [{2α}, {α}) ≈ [0.236, 0.618)
        let arc = Arc::new(Angle::orbit(2), Angle::orbit(1));
        let set = IntervalSet::from_disjoint(vec![arc.clone()], &sys).unwrap();
        let m = set.measure_f64();
        assert!((m - (0.6180339887 - 0.2360679775)).abs() < 1e-9);
        assert!(set.contains(&a("1/2"), &sys).unwrap());
        assert!(!set.contains(&a("1/5"), &sys).unwrap());
        let inner = Arc::new(a("3/10"), a("1/2"));
        assert!(set.contains_arc(&inner, &sys).unwrap());
        let outer = Arc::new(a("3/10"), a("7/10"));
        assert!(!set.contains_arc(&outer, &sys).unwrap());
        assert!(set.measure_lo <= set.measure_hi);
    }

    #[test]
    fn empty_and_full() {
        let sys = System::golden(Config::default()).unwrap();
        assert!(IntervalSet::empty().is_empty());
        assert!(IntervalSet::full().contains(&a("1/3"), &sys).unwrap());
        assert!(IntervalSet::full().measure_at_least(&BigRational::one()));
    }
}
