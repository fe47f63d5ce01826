//! Exact finite checks of the walk estimates along convergent denominators.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rotation::angle::Angle;
use crate::rotation::orbit::{block_sums, omega, prefix_scan};
use crate::sampling::rng_for;
use crate::system::System;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub computed: Value,
    pub expected: Value,
    pub pass: bool,
}

/// Outcome of one verifier run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub proposition: String,
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(proposition: &str, parameters: Value) -> Self {
        Report { proposition: proposition.into(), parameters, checks: Vec::new(), pass: true, notes: Vec::new() }
    }

    pub fn check(&mut self, label: impl Into<String>, computed: Value, expected: Value, pass: bool) {
        self.pass &= pass;
        self.checks.push(Check { label: label.into(), computed, expected, pass });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Folds another report's checks into this one.
    pub fn absorb(&mut self, other: Report) {
        self.pass &= other.pass;
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }
}

/// `ω(q_n)` predicted from the parities of `q_n` and `n`.
pub fn predicted_omega_qn(n: usize, q_n: u64) -> i64 {
    if q_n % 2 == 0 {
        0
    } else if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `ω(q_n)` against its parity-case value.
pub fn verify_prop_qn(sys: &System, n: usize) -> Result<Report> {
    let q = sys.q_steps(n)?;
    let w = omega(sys, &Angle::zero(), q)?;
    let expected = predicted_omega_qn(n, q);
    let mut r = Report::new("prop31", json!({ "n": n, "q_n": q }));
    r.check(format!("omega(q_{n})"), json!(w), json!(expected), w == expected);
    Ok(r)
}

/// The value set of `ω(θ, q_n)` over the given angles and, for odd `q_n`,
/// `|ω(kq_n)| ≤ k` for every `k` with `kq_n < q_{n+1}` inside the budget.
pub fn verify_prop_theta_qn(sys: &System, n: usize, thetas: &[Angle]) -> Result<Report> {
    let q = sys.q_steps(n)?;
    let w0 = omega(sys, &Angle::zero(), q)?;
    let allowed: Vec<i64> = if w0 == 0 { vec![-2, 0, 2] } else { vec![-3, -1, 1, 3] };
    let mut r = Report::new("prop32", json!({ "n": n, "q_n": q, "samples": thetas.len() }));
    if thetas.iter().any(Angle::is_boundary_orbit) {
        r.note("samples include boundary orbits");
    }

    let values: Vec<i64> = thetas.par_iter().map(|t| omega(sys, t, q)).collect::<Result<_>>()?;
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for v in &values {
        *hist.entry(*v).or_default() += 1;
    }
    let bad: Vec<String> = thetas
        .iter()
        .zip(&values)
        .filter(|(_, v)| !allowed.contains(v))
        .take(5)
        .map(|(t, v)| format!("theta={t} omega={v}"))
        .collect();
    let violations = values.iter().filter(|v| !allowed.contains(v)).count();
    r.check(
        format!("omega(theta,q_{n}) value set (omega(q_{n})={w0})"),
        json!({ "histogram": hist, "violations": violations, "examples": bad }),
        json!(allowed),
        violations == 0,
    );

    if q % 2 == 1 {
        let next = sys.q(n + 1)?;
        let by_next = next.to_u64().map(|x| (x - 1) / q).unwrap_or(u64::MAX);
        let k_max = by_next.min(sys.config().step_budget / q);
        if k_max < by_next {
            r.note(format!("part (3) truncated at k={k_max} by the step budget"));
        }
        let sums = block_sums(sys, &Angle::zero(), q, k_max)?;
        let worst = sums.iter().enumerate().map(|(i, w)| w.abs() - (i as i64 + 1)).max().unwrap_or(i64::MIN);
        let violations = sums.iter().enumerate().filter(|(i, w)| w.abs() > *i as i64 + 1).count();
        r.check(
            format!("|omega(k q_{n})| <= k"),
            json!({ "k_max": k_max, "violations": violations, "max_excess": worst }),
            json!("max_excess <= 0"),
            violations == 0,
        );
    }
    Ok(r)
}

/// Shared grid of sampled times for the extreme-value checks.
pub fn sample_times(sys: &System, n: usize, count: usize, seed: u64) -> Result<Vec<u64>> {
    let q = sys.q_steps(n)?;
    let next = sys.q(n + 1)?.to_u64().unwrap_or(u64::MAX);
    let hi = next.min(sys.config().step_budget);
    if hi <= q {
        return Ok(Vec::new());
    }
    let mut rng = rng_for(seed, 0x7469_6d65 ^ n as u64);
    let mut ts: Vec<u64> = (0..count.saturating_sub(1)).map(|_| rng.random_range(q + 1..=hi)).collect();
    ts.push(hi);
    ts.sort_unstable();
    ts.dedup();
    Ok(ts)
}

/// The constant `q_1 + 3Σ_{j=2..n}⌈q_j/q_{j−1}⌉ + 2` of the global bound.
pub fn global_bound_constant(sys: &System, n: usize) -> Result<u64> {
    let q1 = sys.q(1)?.to_u64().ok_or_else(|| Error::OutOfRange { k: "q_1".into(), reason: "too large".into() })?;
    let mut s = 0u64;
    for j in 2..=n {
        let a = sys.q(j)?;
        let b = sys.q(j - 1)?;
        let c = (a + b - 1u32) / b;
        s += c.to_u64().ok_or_else(|| Error::OutOfRange { k: format!("q_{j}"), reason: "ratio too large".into() })?;
    }
    Ok(q1 + 3 * s + 2)
}

/// `q_1 + 3⌈k/q_n⌉ + 3Σ⌈q_j/q_{j−1}⌉ + 2` for `q_n < k ≤ q_{n+1}`.
pub fn global_extreme_bound(sys: &System, n: usize, k: u64) -> Result<u64> {
    let q = sys.q_steps(n)?;
    Ok(global_bound_constant(sys, n)? + 3 * k.div_ceil(q))
}

/// Running-extreme bounds for sampled `(θ, t)` pairs with `q_n < t ≤ q_{n+1}`,
/// the global bound on the sampled maxima, and the lower bound at `θ = 0`
/// when `q_{n+1} ≤ exact_cap`.
pub fn verify_extreme_bounds(sys: &System, n: usize, thetas: &[Angle], times: &[u64], exact_cap: u64) -> Result<Report> {
    let q = sys.q_steps(n)?;
    let mut r = Report::new(
        "prop33_prop34",
        json!({ "n": n, "q_n": q, "thetas": thetas.len(), "times": times.len(), "pairs": thetas.len() * times.len() }),
    );
    if let Some(t) = times.iter().find(|&&t| t <= q) {
        return Err(Error::InvalidInput(format!("sampled time {t} is not above q_{n}={q}")));
    }
    let mut checkpoints: Vec<u64> = times.to_vec();
    checkpoints.push(q);

    // per θ: (M(θ,q_n), m(θ,q_n), [(t, M(θ,t), m(θ,t))])
    let scans: Vec<Vec<_>> = thetas.par_iter().map(|t| prefix_scan(sys, t, &checkpoints)).collect::<Result<_>>()?;

    let mut upper_bad = 0usize;
    let mut lower_bad = 0usize;
    let mut slack_upper = i64::MAX;
    let mut slack_lower = i64::MAX;
    let mut global_max: BTreeMap<u64, i64> = BTreeMap::new();
    let mut global_min: BTreeMap<u64, i64> = BTreeMap::new();
    for scan in &scans {
        let at_q = scan.iter().find(|c| c.t == q).expect("q_n is a checkpoint");
        for c in scan.iter().filter(|c| c.t != q) {
            let extra = 3 * c.t.div_ceil(q) as i64;
            let su = at_q.max + extra - c.max;
            let sl = c.min - (at_q.min - extra);
            upper_bad += (su < 0) as usize;
            lower_bad += (sl < 0) as usize;
            slack_upper = slack_upper.min(su);
            slack_lower = slack_lower.min(sl);
            let gm = global_max.entry(c.t).or_insert(i64::MIN);
            *gm = (*gm).max(c.max);
            let gn = global_min.entry(c.t).or_insert(i64::MAX);
            *gn = (*gn).min(c.min);
        }
    }
    let pairs = thetas.len() * times.len();
    r.check(
        "M(theta,t) <= M(theta,q_n) + 3ceil(t/q_n)",
        json!({ "pairs": pairs, "violations": upper_bad, "min_slack": slack_upper }),
        json!("violations = 0"),
        upper_bad == 0,
    );
    r.check(
        "m(theta,t) >= m(theta,q_n) - 3ceil(t/q_n)",
        json!({ "pairs": pairs, "violations": lower_bad, "min_slack": slack_lower }),
        json!("violations = 0"),
        lower_bad == 0,
    );

    let mut g_bad = 0usize;
    let mut worst = i64::MAX;
    for (&t, &mx) in &global_max {
        let b = global_extreme_bound(sys, n, t)? as i64;
        let mn = global_min[&t];
        let s = (b - mx).min(mn + b);
        worst = worst.min(s);
        g_bad += (s < 0) as usize;
    }
    r.check(
        "sampled max/min within the global extreme bound",
        json!({ "times": global_max.len(), "violations": g_bad, "min_slack": worst }),
        json!("violations = 0"),
        g_bad == 0,
    );

    let next = sys.q(n + 1)?.to_u64();
    match next {
        Some(qn1) if qn1 <= exact_cap && qn1 <= sys.config().step_budget && qn1 > q => {
            let scan = prefix_scan(sys, &Angle::zero(), &[q, qn1])?;
            let w = scan[0].omega;
            let lhs = scan[1].max.max(scan[1].min.abs());
            let rhs = w.abs() * (qn1 / (6 * q)) as i64;
            r.check(
                format!("max(M(0,q_{}), |m(0,q_{})|) >= |omega(q_{n})| floor(q_{}/(6q_{n}))", n + 1, n + 1, n + 1),
                json!(lhs),
                json!({ ">=": rhs }),
                lhs >= rhs,
            );
        }
        _ => r.note(format!("lower bound at theta=0 skipped: q_{} above {exact_cap}", n + 1)),
    }
    if times.is_empty() {
        r.note("no times in (q_n, q_{n+1}] within the step budget");
    }
    Ok(r)
}
