//! Coding symbols along an orbit and the walk sums built from them.
//!
//! Symbols come from a 128-bit fixed-point image of the orbit with a tracked
//! error bound. A symbol is accepted only when the error cannot move the
//! point across `0` or `1/2`; otherwise it is recomputed exactly. Long sums
//! jump over windows of `q_j` consecutive offsets using the sorted table of
//! `{jα}`, certified the same way.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::{half, mod_2_128};
use crate::rotation::angle::{Angle, Linear};
use crate::system::System;

const HALF: u128 = 1 << 127;
const LOW: u128 = HALF - 1;
// beyond this the fixed-point image says nothing useful
const ERR_LIMIT: u128 = 1 << 124;

/// A prepared orbit `{θ + iα}` over a fixed system.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    sys: &'a System,
    angle: Angle,
    base: u128,
    base_err: u128,
    // offset i at which θ + iα is rational
    rational_at: Option<i64>,
}

impl<'a> Orbit<'a> {
    pub fn new(sys: &'a System, angle: &Angle) -> Self {
        let f = sys.fixed();
        let scale = BigRational::from_integer(BigInt::one() << 128u32);
        let k = angle.k();
        let exact = angle.s() * &scale + k * BigRational::from_integer(BigInt::from(f.value));
        let base = mod_2_128(&exact.floor().to_integer());
        let spread = (k.abs() * BigRational::from_integer(BigInt::from(f.err))).ceil().to_integer();
        let base_err = spread.to_u128().unwrap_or(u128::MAX).saturating_add(2);
        let rational_at = angle.integer_k().and_then(|k| k.checked_neg());
        Orbit { sys, angle: angle.clone(), base, base_err, rational_at }
    }

    pub fn angle(&self) -> &Angle {
        &self.angle
    }

    pub fn system(&self) -> &System {
        self.sys
    }

    fn point(&self, i: i64) -> u128 {
        self.base.wrapping_add((i as i128 as u128).wrapping_mul(self.sys.fixed().value))
    }

    fn err_at(&self, reach: u64) -> u128 {
        self.base_err.saturating_add((reach as u128).saturating_mul(self.sys.fixed().err))
    }

    /// `z_i(θ)`: `+1` iff `{θ + iα} ∈ [0, 1/2)`.
    pub fn symbol(&self, i: i64) -> Result<i8> {
        let e = self.err_at(i.unsigned_abs());
        let x = self.point(i);
        match fast_symbol(x, e) {
            Some(z) if self.rational_at != Some(i) => Ok(z),
            _ => self.exact_symbol(i),
        }
    }

    fn exact_symbol(&self, i: i64) -> Result<i8> {
        let x = self.angle.shift_alpha(i).linear();
        let v = x.frac(self.sys)?;
        let below = v.cmp(&Linear::rational(half()), self.sys)?.is_lt();
        Ok(if below { 1 } else { -1 })
    }

    /// Calls `f(i, z_i)` for `i = m..=n` in order.
    pub fn stream(&self, m: i64, n: i64, mut f: impl FnMut(i64, i8)) -> Result<()> {
        if n < m {
            return Ok(());
        }
        let e = self.err_at(m.unsigned_abs().max(n.unsigned_abs()));
        let a = self.sys.fixed().value;
        let mut x = self.point(m);
        if e >= ERR_LIMIT {
            for i in m..=n {
                f(i, self.exact_symbol(i)?);
            }
            return Ok(());
        }
        let (lo, span) = (e + 1, HALF - 2 * e - 1);
        for i in m..=n {
            let y = x & LOW;
            let z = if y.wrapping_sub(lo) < span && self.rational_at != Some(i) {
                if x < HALF {
                    1
                } else {
                    -1
                }
            } else {
                self.exact_symbol(i)?
            };
            f(i, z);
            x = x.wrapping_add(a);
        }
        Ok(())
    }

    /// `Σ_{i=m..n} z_i(θ)`, jumping over table windows where certified.
    pub fn sum(&self, m: i64, n: i64) -> Result<i64> {
        if n < m {
            return Ok(0);
        }
        let levels = self.sys.window_levels();
        let mut i = m;
        let mut total = 0i64;
        while i <= n {
            let remaining = (n - i) as u64 + 1;
            match levels.iter().find(|&&(_, q)| q <= remaining) {
                Some(&(level, q)) => {
                    total += match self.window_sum(i, level)? {
                        Some(s) => s,
                        None => self.stream_sum(i, i + q as i64 - 1)?,
                    };
                    i += q as i64;
                }
                None => {
                    total += self.stream_sum(i, n)?;
                    break;
                }
            }
        }
        Ok(total)
    }

    fn stream_sum(&self, m: i64, n: i64) -> Result<i64> {
        let mut s = 0i64;
        self.stream(m, n, |_, z| s += z as i64)?;
        Ok(s)
    }

    /// Sum over the window `start .. start + q_level` from the sorted table,
    /// or `None` if the error bound does not certify the count.
    fn window_sum(&self, start: i64, level: usize) -> Result<Option<i64>> {
        let table = self.sys.table(level);
        let q = table.len() as i64;
        if let Some(r) = self.rational_at {
            if r >= start && r < start + q {
                return Ok(None);
            }
        }
        let e = self.err_at(start.unsigned_abs() + q as u64);
        if e >= ERR_LIMIT {
            return Ok(None);
        }
        // x_start + t ∈ [0, 1/2)  ⇔  t ∈ [lo, lo + 1/2)
        let lo = self.point(start).wrapping_neg();
        let hi = lo.wrapping_add(HALF);
        if !clear_of(table, lo, e) || !clear_of(table, hi, e) {
            return Ok(None);
        }
        let plo = table.partition_point(|&t| t < lo);
        let phi = table.partition_point(|&t| t < hi);
        let count = if lo < hi { phi - plo } else { table.len() - plo + phi } as i64;
        Ok(Some(2 * count - q))
    }
}

fn fast_symbol(x: u128, e: u128) -> Option<i8> {
    if e >= ERR_LIMIT {
        return None;
    }
    let y = x & LOW;
    (y > e && y < HALF - e).then_some(if x < HALF { 1 } else { -1 })
}

fn circ_dist(a: u128, b: u128) -> u128 {
    a.wrapping_sub(b).min(b.wrapping_sub(a))
}

/// No table entry lies within `e` of `p` on the circle.
fn clear_of(table: &[u128], p: u128, e: u128) -> bool {
    let n = table.len();
    let idx = table.partition_point(|&t| t < p);
    let above = table[idx % n];
    let below = table[(idx + n - 1) % n];
    circ_dist(above, p) > e && circ_dist(below, p) > e
}

/// `z_i(θ)` for a single offset.
pub fn code_symbol(sys: &System, theta: &Angle, i: i64) -> Result<i8> {
    Orbit::new(sys, theta).symbol(i)
}

/// `ω(θ, m, n) = Σ_{i=m..n} z_i(θ)`.
pub fn walk(sys: &System, theta: &Angle, m: i64, n: i64) -> Result<i64> {
    if m > n {
        return Err(Error::InvalidInput(format!("walk needs m <= n, got m={m} n={n}")));
    }
    sys.check_steps((n - m) as u128 + 1)?;
    Orbit::new(sys, theta).sum(m, n)
}

/// `ω(θ, n) = ω(θ, 1, n)`, with `ω(θ, 0) = 0`.
pub fn omega(sys: &System, theta: &Angle, n: u64) -> Result<i64> {
    if n == 0 {
        return Ok(0);
    }
    walk(sys, theta, 1, n as i64)
}

/// Prefix sums `ω(θ, 1..=n)` with running extremes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkRecord {
    pub n: u64,
    pub omega: Vec<i64>,
    pub max: i64,
    pub min: i64,
}

pub fn walk_record(sys: &System, theta: &Angle, n: u64) -> Result<WalkRecord> {
    if n == 0 {
        return Err(Error::InvalidInput("walk_record needs n >= 1".into()));
    }
    sys.check_steps(n as u128)?;
    let mut omega = Vec::with_capacity(n as usize);
    let mut acc = 0i64;
    Orbit::new(sys, theta).stream(1, n as i64, |_, z| {
        acc += z as i64;
        omega.push(acc);
    })?;
    let max = *omega.iter().max().expect("n >= 1");
    let min = *omega.iter().min().expect("n >= 1");
    Ok(WalkRecord { n, omega, max, min })
}

/// Walk state captured at one time of a prefix scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Checkpoint {
    pub t: u64,
    pub omega: i64,
    /// `M(θ, t)`
    pub max: i64,
    /// `m(θ, t)`
    pub min: i64,
}

/// One forward stream over `1..=max(times)` reporting `ω`, `M`, `m` at each
/// requested time. Times must be positive; they are reported sorted.
pub fn prefix_scan(sys: &System, theta: &Angle, times: &[u64]) -> Result<Vec<Checkpoint>> {
    let mut ts: Vec<u64> = times.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.first() == Some(&0) {
        return Err(Error::InvalidInput("prefix_scan times must be >= 1".into()));
    }
    let Some(&last) = ts.last() else { return Ok(Vec::new()) };
    sys.check_steps(last as u128)?;
    let mut out = Vec::with_capacity(ts.len());
    let (mut acc, mut max, mut min) = (0i64, i64::MIN, i64::MAX);
    let mut next = 0usize;
    Orbit::new(sys, theta).stream(1, last as i64, |i, z| {
        acc += z as i64;
        max = max.max(acc);
        min = min.min(acc);
        if ts[next] == i as u64 {
            out.push(Checkpoint { t: i as u64, omega: acc, max, min });
            next += 1;
        }
    })?;
    Ok(out)
}

/// `ω(θ, q·i)` for `i = 1..=count`, each block summed with window jumps.
pub fn block_sums(sys: &System, theta: &Angle, q: u64, count: u64) -> Result<Vec<i64>> {
    sys.check_steps(q as u128 * count as u128)?;
    let orbit = Orbit::new(sys, theta);
    let mut out = Vec::with_capacity(count as usize);
    let mut acc = 0i64;
    for i in 0..count {
        let start = (i * q) as i64 + 1;
        acc += orbit.sum(start, start + q as i64 - 1)?;
        out.push(acc);
    }
    Ok(out)
}
