//! The set `{θ : ω(θ, iq_n) = i for 1 ≤ i ≤ L}` with
//! `L = ⌊‖q_{n−1}α‖ / (6‖q_nα‖)⌋`, computed exactly by a breakpoint sweep or
//! from the explicit union of short arcs `ℓα + [0, ¼‖q_{n−1}α‖)`.

use std::cell::RefCell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::norm_distance;
use crate::error::{Error, Result};
use crate::ratio::{half, to_bigint};
use crate::rotation::angle::{Angle, Linear};
use crate::rotation::interval_set::{Arc, IntervalSet};
use crate::rotation::orbit::{block_sums, Orbit};
use crate::sampling::{random_unit, rng_for};
use crate::system::System;

const HALF: u128 = 1 << 127;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrenceMode {
    Exact,
    Constructive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceResult {
    pub n: usize,
    pub q_n: u64,
    /// `⌊‖q_{n−1}α‖ / (6‖q_nα‖)⌋`
    pub l: u64,
    /// `⌊‖q_{n−1}α‖ / (4‖q_nα‖)⌋ − 1`; the arc argument needs `l` at most this.
    pub l_quarter: i64,
    pub regime_reached: bool,
    pub requested: RecurrenceMode,
    pub mode: RecurrenceMode,
    pub case: Option<String>,
    /// `q_n` even: every `ω(θ, q_n)` is even, so `ω(θ, q_n) = 1` never holds.
    pub parity_obstruction: bool,
    pub breakpoints: Option<u64>,
    pub set: IntervalSet,
    pub certified_eighth: bool,
    pub notes: Vec<String>,
}

/// `(−1)^n (q_nα − p_n) = ‖q_nα‖` as an exact linear form.
pub fn best_error(sys: &System, n: usize) -> Result<Linear> {
    let p = BigRational::from_integer(to_bigint(sys.p(n)?));
    let q = BigRational::from_integer(to_bigint(sys.q(n)?));
    let e = Linear::new(-p, q);
    Ok(if n % 2 == 0 { e } else { Linear::new(-e.r, -e.c) })
}

/// `⌊‖q_{n−1}α‖ / (d‖q_nα‖)⌋`, certified by deepening enclosures.
pub fn norm_ratio_floor(sys: &System, n: usize, d: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("the ratio needs n >= 1".into()));
    }
    let a = BigInt::from(sys.q(n - 1)?.clone());
    let b = BigInt::from(sys.q(n)?.clone());
    let dd = BigRational::from_integer(BigInt::from(d));
    for depth in n.min(sys.max_depth())..=sys.max_depth() {
        let enc = sys.enclosure(depth);
        let num = norm_distance(&a, enc);
        let den = norm_distance(&b, enc);
        if den.lo.is_zero() {
            continue;
        }
        let lo = &num.lo / (&dd * &den.hi);
        let hi = &num.hi / (&dd * &den.lo);
        let f = lo.floor();
        if hi < &f + BigRational::from_integer(1.into()) {
            return f.to_integer().to_u64().ok_or_else(|| Error::OutOfRange { k: "L".into(), reason: "too large".into() });
        }
    }
    Err(Error::Undecided { depth: sys.max_depth(), what: format!("floor of the norm ratio at n={n}") })
}

/// Breakpoint `{c − jα}` with `c ∈ {0, 1/2}` and its fixed-point key.
#[derive(Clone, Copy, Debug)]
struct Breakpoint {
    key: u128,
    err: u128,
    j: u64,
    half: bool,
}

impl Breakpoint {
    fn angle(&self) -> Angle {
        let s = if self.half { half() } else { BigRational::zero() };
        Angle::new(s, BigRational::from_integer(-BigInt::from(self.j)))
    }

    fn certain(&self) -> bool {
        self.key > self.err && self.key < u128::MAX - self.err
    }
}

fn exact_cmp(a: &Angle, b: &Angle, sys: &System) -> Result<Ordering> {
    a.cmp_on_circle(b, sys)
}

/// Sorts circle points by their representative in `[0, 1)`, trusting keys
/// only where the error bounds separate them.
fn sort_points(points: &mut [Breakpoint], sys: &System) -> Result<()> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    points.sort_by(|a, b| {
        if a.certain() && b.certain() {
            let gap = a.key.abs_diff(b.key);
            if gap > a.err.saturating_add(b.err) {
                return a.key.cmp(&b.key);
            }
        }
        match exact_cmp(&a.angle(), &b.angle(), sys) {
            Ok(o) => o,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Ordering::Equal
            }
        }
    });
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn key_of(sys: &System, s_half: bool, j: u64) -> (u128, u128) {
    let f = sys.fixed();
    let base = if s_half { HALF } else { 0 };
    let key = base.wrapping_sub((j as u128).wrapping_mul(f.value));
    let err = (j as u128).saturating_mul(f.err).saturating_add(1);
    (key, err)
}

struct Levels {
    n: usize,
    q: u64,
    l: u64,
    l_quarter: i64,
}

fn levels(sys: &System, n: usize) -> Result<Levels> {
    let q = sys.q_steps(n)?;
    let l = norm_ratio_floor(sys, n, 6)?;
    let l_quarter = norm_ratio_floor(sys, n, 4)? as i64 - 1;
    Ok(Levels { n, q, l, l_quarter })
}

/// Computes the recurrence set. Exact mode falls back to the constructive
/// region when `2Lq_n` exceeds the sweep cap.
pub fn recurrence_set(sys: &System, n: usize, mode: RecurrenceMode) -> Result<RecurrenceResult> {
    let lv = levels(sys, n)?;
    let mut notes = Vec::new();
    let regime_reached = (lv.l as i64) <= lv.l_quarter;
    if !regime_reached {
        notes.push(format!("regime not reached at n={n}: L={} > floor(d/4e)-1={}", lv.l, lv.l_quarter));
    }
    let parity_obstruction = lv.q % 2 == 0;
    if parity_obstruction && lv.l > 0 {
        notes.push(format!("q_{n}={} is even, so omega(theta,q_{n}) is even and cannot equal 1", lv.q));
    }
    let base = RecurrenceResult {
        n,
        q_n: lv.q,
        l: lv.l,
        l_quarter: lv.l_quarter,
        regime_reached,
        requested: mode,
        mode,
        case: None,
        parity_obstruction,
        breakpoints: None,
        set: IntervalSet::full(),
        certified_eighth: true,
        notes,
    };
    if lv.l == 0 {
        let mut r = base;
        r.notes.push("L = 0: no constraint, the set is the whole circle".into());
        return Ok(r);
    }
    let count = 2u128 * lv.l as u128 * lv.q as u128;
    let mode = if mode == RecurrenceMode::Exact && count > sys.config().sweep_cap as u128 {
        let mut r = base;
        r.notes.push(format!("{count} breakpoints exceed the sweep cap {}; using the constructive region", sys.config().sweep_cap));
        return constructive(sys, &lv, r);
    } else {
        mode
    };
    match mode {
        RecurrenceMode::Exact => exact(sys, &lv, base),
        RecurrenceMode::Constructive => constructive(sys, &lv, base),
    }
}

fn eighth() -> BigRational {
    BigRational::new(1.into(), 8.into())
}

fn exact(sys: &System, lv: &Levels, mut out: RecurrenceResult) -> Result<RecurrenceResult> {
    let (q, l) = (lv.q, lv.l);
    let total = l * q;
    let mut points: Vec<Breakpoint> = Vec::with_capacity(2 * total as usize);
    for j in 1..=total {
        for h in [false, true] {
            let (key, err) = key_of(sys, h, j);
            points.push(Breakpoint { key, err, j, half: h });
        }
    }
    sort_points(&mut points, sys)?;

    // D_i = ω(θ, iq) − i, kept as first differences so a suffix shift is O(1)
    let initial = block_sums(sys, &Angle::zero(), q, l)?;
    let mut diff = vec![0i64; l as usize + 1];
    let mut prev = 0i64;
    for (i, w) in initial.iter().enumerate() {
        let d = w - (i as i64 + 1);
        diff[i + 1] = d - prev;
        prev = d;
    }
    let mut nonzero = diff.iter().filter(|&&x| x != 0).count();

    let mut arcs: Vec<Arc> = Vec::new();
    let first_good = nonzero == 0;
    let mut open: Option<Angle> = first_good.then(Angle::zero);
    for p in &points {
        let i0 = p.j.div_ceil(q) as usize;
        let before = diff[i0] != 0;
        diff[i0] += if p.half { -2 } else { 2 };
        let after = diff[i0] != 0;
        if before != after {
            if after {
                nonzero += 1;
            } else {
                nonzero -= 1;
            }
        }
        let good = nonzero == 0;
        match (&open, good) {
            (None, true) => open = Some(p.angle()),
            (Some(_), false) => arcs.push(Arc::new(open.take().expect("open arc"), p.angle())),
            _ => {}
        }
    }
    debug_assert_eq!(nonzero == 0, first_good);
    if let Some(start) = open {
        if first_good && !arcs.is_empty() {
            // the last run continues through 0 into the first arc
            let first = arcs.remove(0);
            arcs.insert(0, Arc::new(start, first.end));
        } else if first_good {
            out.set = IntervalSet::full();
            out.breakpoints = Some(points.len() as u64);
            out.mode = RecurrenceMode::Exact;
            out.certified_eighth = true;
            return Ok(out);
        } else {
            arcs.push(Arc::new(start, Angle::zero()));
        }
    }
    out.set = IntervalSet::from_disjoint(arcs, sys)?;
    out.mode = RecurrenceMode::Exact;
    out.breakpoints = Some(points.len() as u64);
    out.certified_eighth = out.set.measure_at_least(&eighth());
    Ok(out)
}

/// Orbit point `{ℓα}` with its fixed-point key.
#[derive(Clone, Copy)]
struct OrbitPoint {
    key: u128,
    err: u128,
    l: u64,
}

fn orbit_point(sys: &System, l: u64) -> OrbitPoint {
    let f = sys.fixed();
    let key = (l as u128).wrapping_mul(f.value);
    let err = (l as u128).saturating_mul(f.err).saturating_add(1);
    OrbitPoint { key, err, l }
}

fn cmp_orbit(a: &OrbitPoint, b: &OrbitPoint, sys: &System) -> Result<Ordering> {
    let certain = |p: &OrbitPoint| p.key > p.err && p.key < u128::MAX - p.err;
    if certain(a) && certain(b) && a.key.abs_diff(b.key) > a.err.saturating_add(b.err) {
        return Ok(a.key.cmp(&b.key));
    }
    Angle::orbit(a.l as i64).cmp_on_circle(&Angle::orbit(b.l as i64), sys)
}

/// Points `{ℓα}`, `1 ≤ ℓ ≤ q`, closest to `1/2` from below and above.
fn neighbours_of_half(sys: &System, q: u64) -> Result<(u64, u64)> {
    let mut below: Option<OrbitPoint> = None;
    let mut above: Option<OrbitPoint> = None;
    let mut failure = None;
    Orbit::new(sys, &Angle::zero()).stream(1, q as i64, |l, z| {
        if failure.is_some() {
            return;
        }
        let p = orbit_point(sys, l as u64);
        let (slot, want) = if z > 0 { (&mut below, Ordering::Greater) } else { (&mut above, Ordering::Less) };
        match slot {
            None => *slot = Some(p),
            Some(best) => match cmp_orbit(&p, best, sys) {
                Ok(o) if o == want => *best = p,
                Ok(_) => {}
                Err(e) => failure = Some(e),
            },
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    match (below, above) {
        (Some(b), Some(a)) => Ok((b.l, a.l)),
        _ => Err(Error::InvalidInput(format!("the first {q} orbit points do not straddle 1/2"))),
    }
}

fn constructive(sys: &System, lv: &Levels, mut out: RecurrenceResult) -> Result<RecurrenceResult> {
    let q = lv.q;
    if q > sys.config().sweep_cap {
        return Err(Error::StepBudget { needed: q as u128, budget: sys.config().sweep_cap });
    }
    let delta = best_error(sys, lv.n - 1)?;
    let rho = delta.scale(&BigRational::new(1.into(), 4.into()));
    let half_delta = delta.scale(&BigRational::new(1.into(), 2.into()));
    let h = Linear::rational(half());
    let (s1, s2) = neighbours_of_half(sys, q)?;
    let v1 = Angle::orbit(s1 as i64).value(sys)?;
    let v2 = Angle::orbit(s2 as i64).value(sys)?;
    let d1 = h.sub(&v1);
    let d2 = v2.sub(&h);

    let even = lv.n % 2 == 0;
    let (case, lo_off, hi_off) = if even {
        if d1.cmp(&half_delta, sys)? != Ordering::Less {
            ("even, case 1", Linear::zero(), rho.clone())
        } else {
            let a = d1.add_rational(&half());
            ("even, case 2", a.clone(), a.add(&rho))
        }
    } else if d2.cmp(&half_delta, sys)? != Ordering::Less {
        let a = Linear::rational(half());
        ("odd, case 1", a.sub(&rho), a)
    } else {
        let a = Linear::zero().sub(&d2);
        ("odd, case 2", a.sub(&rho), a)
    };
    let arcs: Vec<Arc> = (1..=q as i64)
        .map(|l| {
            let base = Linear::multiple(l);
            Arc::new(Angle::from_linear(&base.add(&lo_off)), Angle::from_linear(&base.add(&hi_off)))
        })
        .collect();
    let measure = rho.scale(&BigRational::from_integer(BigInt::from(q)));
    out.set = IntervalSet::with_measure(arcs, measure, sys);
    out.mode = RecurrenceMode::Constructive;
    out.case = Some(case.to_string());
    out.certified_eighth = out.set.measure_at_least(&eighth());
    Ok(out)
}

/// Result of walking sampled members of a recurrence set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberCheck {
    pub samples: usize,
    pub misclassified: usize,
    pub examples: Vec<String>,
}

/// Draws points uniformly from the arcs of `result.set` and checks
/// `ω(θ, iq_n) = i` for every `i ≤ L` by direct walk evaluation.
pub fn verify_members(sys: &System, result: &RecurrenceResult, samples: usize, seed: u64) -> Result<MemberCheck> {
    let set = &result.set;
    if result.l == 0 || (set.arcs.is_empty() && !set.full) {
        return Ok(MemberCheck { samples: 0, misclassified: 0, examples: Vec::new() });
    }
    let (q, l) = (result.q_n, result.l);
    let outcomes: Vec<Option<String>> = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<Option<String>> {
            let mut rng = rng_for(seed, s as u64);
            let u = random_unit(&mut rng);
            let theta = if set.full {
                Angle::rational(u)
            } else {
                let arc = &set.arcs[rng.random_range(0..set.arcs.len())];
                let len = arc.length(sys)?;
                arc.start.add(&len.scale(&u))
            };
            let sums = block_sums(sys, &theta, q, l)?;
            let bad = sums.iter().enumerate().find(|(i, w)| **w != *i as i64 + 1);
            Ok(bad.map(|(i, w)| format!("theta={theta}: omega(theta,{}q)={w}", i + 1)))
        })
        .collect::<Result<_>>()?;
    let misclassified = outcomes.iter().filter(|o| o.is_some()).count();
    let examples = outcomes.into_iter().flatten().take(5).collect();
    Ok(MemberCheck { samples, misclassified, examples })
}

/// Whether every constructive arc lies inside the exact set.
pub fn constructive_within_exact(sys: &System, n: usize) -> Result<bool> {
    let ex = recurrence_set(sys, n, RecurrenceMode::Exact)?;
    let co = recurrence_set(sys, n, RecurrenceMode::Constructive)?;
    if ex.mode != RecurrenceMode::Exact {
        return Err(Error::StepBudget { needed: 2 * ex.l as u128 * ex.q_n as u128, budget: sys.config().sweep_cap });
    }
    for arc in &co.set.arcs {
        if !ex.set.contains_arc(arc, sys)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Tau;
    use crate::rotation::orbit::omega;
    use crate::system::Config;

    fn tau_half() -> System {
        System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap()
    }

    #[test]
    fn lemma_depths_for_tau_half() {
        let t = tau_half();
        assert_eq!(norm_ratio_floor(&t, 1, 6).unwrap(), 1);
        assert_eq!(norm_ratio_floor(&t, 2, 6).unwrap(), 18);
    }

    #[test]
    fn golden_l_is_zero_and_set_is_full() {
        let g = System::golden(Config::default()).unwrap();
        let r = recurrence_set(&g, 5, RecurrenceMode::Exact).unwrap();
        assert_eq!(r.l, 0);
        assert!(r.set.full);
        assert!(r.set.measure_at_least(&BigRational::from_integer(1.into())));
    }

    #[test]
    fn exact_set_for_n1_by_brute_force() {
        let t = tau_half();
        let r = recurrence_set(&t, 1, RecurrenceMode::Exact).unwrap();
        assert_eq!(r.mode, RecurrenceMode::Exact);
        // grid oracle: fraction of θ = (i + 1/2)/N with ω(θ, 5) = 1
        let n = 4000;
        let mut hits = 0;
        for i in 0..n {
            let th = Angle::rational(BigRational::new((2 * i + 1).into(), (2 * n).into()));
            let inside = r.set.contains(&th, &t).unwrap();
            let direct = omega(&t, &th, 5).unwrap() == 1;
            assert_eq!(inside, direct, "theta={th}");
            hits += direct as usize;
        }
        let m = r.set.measure_f64();
        assert!((m - hits as f64 / n as f64).abs() < 5e-3, "measure {m} vs grid {}", hits as f64 / n as f64);
    }

    #[test]
    fn constructive_n1_is_inside_exact_and_members_walk() {
        let t = tau_half();
        assert!(constructive_within_exact(&t, 1).unwrap());
        let c = recurrence_set(&t, 1, RecurrenceMode::Constructive).unwrap();
        assert!(c.certified_eighth);
        let chk = verify_members(&t, &c, 200, 5).unwrap();
        assert_eq!(chk.misclassified, 0, "{chk:?}");
    }

    #[test]
    fn n2_has_parity_obstruction() {
        let t = tau_half();
        let r = recurrence_set(&t, 2, RecurrenceMode::Exact).unwrap();
        assert!(r.parity_obstruction);
        assert!(r.set.is_empty());
        assert!(!r.certified_eighth);
    }

    #[test]
    fn constructive_n3_members_walk() {
        let t = tau_half();
        let c = recurrence_set(&t, 3, RecurrenceMode::Exact).unwrap();
        assert_eq!(c.mode, RecurrenceMode::Constructive);
        assert!(c.certified_eighth);
        assert!(c.regime_reached);
        let chk = verify_members(&t, &c, 50, 1).unwrap();
        assert_eq!(chk.misclassified, 0, "{chk:?}");
    }
}
