use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use dwrs::cf::{DigitBudget, Tau};
use dwrs::complexity::bounds::{nonincreasing_at, pair_thresholds};
use dwrs::complexity::{
    build_f, complexity_profile, estimate_entropy_dimension, sequence_dimension, sturmian_complexity, upper_bound_profile, EstimateConfig,
    SampleSpec, SceneryLaw,
};
use dwrs::ratio::{format_rational, parse_rational};
use dwrs::rotation::recurrence::{recurrence_set, verify_members, RecurrenceMode};
use dwrs::rotation::verify::{sample_times, verify_extreme_bounds, verify_prop_qn, verify_prop_theta_qn, Report};
use dwrs::rotation::{walk_record, Angle};
use dwrs::sampling::theta_samples;
use dwrs::scenery::coding_rows;
use dwrs::system::{Config, System};
use num_traits::ToPrimitive;

use crate::args::{Budgets, Command, ComplexityCmd, Mode, Seq, SystemArgs, Which};
use crate::{Failure, Outcome, Table};

pub fn config(b: &Budgets) -> Config {
    let d = Config::default();
    Config {
        depth_cap: b.depth_cap.unwrap_or(d.depth_cap),
        digit_budget: b.max_digits.map(|m| DigitBudget { max_decimal_digits: m }).unwrap_or(d.digit_budget),
        step_budget: b.step_budget.unwrap_or(d.step_budget),
        sweep_cap: b.sweep_cap.unwrap_or(d.sweep_cap),
        table_cap: b.table_cap.unwrap_or(d.table_cap),
    }
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Digits { .. } => "digits",
        Command::Convergents { .. } => "convergents",
        Command::Walk { .. } => "walk",
        Command::Verify { .. } => "verify",
        Command::Simulate { .. } => "simulate",
        Command::BuildF { .. } => "build-f",
        Command::Dimension { .. } => "dimension",
        Command::Complexity { .. } => "complexity",
        Command::Estimate { .. } => "estimate",
        Command::Rerun { .. } => "rerun",
    }
}

fn system(a: &SystemArgs, config: &Config) -> Result<System, Failure> {
    let c = config.clone();
    if let Some(t) = &a.tau {
        return Ok(System::for_tau(Tau::parse(t)?, c)?);
    }
    if a.golden {
        return Ok(System::golden(c)?);
    }
    if let Some(ds) = &a.digits {
        let digits: Vec<BigUint> =
            ds.iter().map(|d| d.trim().parse::<BigUint>().map_err(|_| Failure::Usage(format!("bad digit `{d}`")))).collect::<Result<_, _>>()?;
        return Ok(System::from_digits(digits, c)?);
    }
    if let Some(ts) = &a.staircase {
        let taus: Vec<Tau> = ts.iter().map(|t| Tau::parse(t)).collect::<Result<_, _>>()?;
        return Ok(System::staircase(taus, c)?);
    }
    Err(Failure::Usage("choose a rotation with --tau, --golden, --digits or --staircase".into()))
}

fn tau_of(a: &SystemArgs) -> Option<f64> {
    a.tau.as_deref().and_then(|t| Tau::parse(t).ok()).map(|t| t.to_f64())
}

fn bias(text: &str) -> Result<SceneryLaw, Failure> {
    let p = parse_rational(text)?;
    let num = p.numer().to_u64().ok_or_else(|| Failure::Usage(format!("bias `{text}` out of range")))?;
    let den = p.denom().to_u64().ok_or_else(|| Failure::Usage(format!("bias `{text}` out of range")))?;
    if num == 0 || num >= den {
        return Err(Failure::Usage(format!("bias `{text}` must lie strictly between 0 and 1")));
    }
    Ok(SceneryLaw::Bernoulli { num, den })
}

fn to_json<T: Serialize>(v: &T) -> Result<Value, Failure> {
    Ok(serde_json::to_value(v)?)
}

fn s<T: ToString>(v: T) -> String {
    v.to_string()
}

pub fn dispatch(cmd: &Command, config: &Config) -> Result<Outcome, Failure> {
    match cmd {
        Command::Digits { system: sa, count } => digits(&system(sa, config)?, *count, config),
        Command::Convergents { system: sa, n } => convergents(&system(sa, config)?, *n),
        Command::Walk { system: sa, theta, n, record } => walk(&system(sa, config)?, theta, *n, *record),
        Command::Verify { which, system: sa, n, min_n, max_n, seed, samples, times, exact_cap, mode, member_samples } => {
            let sys = system(sa, config)?;
            let range: Vec<usize> = match (n, max_n) {
                (Some(n), _) => vec![*n],
                (None, Some(m)) if m >= min_n => (*min_n..=*m).collect(),
                _ => return Err(Failure::Usage("give --n or --max-n (>= --min-n)".into())),
            };
            let opts = VerifyOpts { seed: *seed, samples: *samples, times: *times, exact_cap: *exact_cap, mode: *mode, members: *member_samples };
            verify(&sys, *which, &range, &opts)
        }
        Command::Simulate { system: sa, sampling, theta, times, t_max } => {
            let sys = system(sa, config)?;
            let ts: Vec<u64> = match (times, t_max) {
                (Some(t), _) => t.clone(),
                (None, Some(m)) => (0..=*m).collect(),
                _ => return Err(Failure::Usage("give --times or --t-max".into())),
            };
            let spec = SampleSpec { samples: sampling.samples, seed: sampling.seed, scenery: bias(&sampling.bias)? };
            let fixed = theta.as_deref().map(parse_rational).transpose()?.map(Angle::rational);
            simulate(&sys, &spec, fixed, &ts)
        }
        Command::BuildF { system: sa, max_n } => build_f_cmd(&system(sa, config)?, *max_n),
        Command::Dimension { seq, terms, system: sa, max_n, tail } => dimension(*seq, *terms, sa, config, *max_n, *tail),
        Command::Complexity { what } => complexity(what, config),
        Command::Estimate { system: sa, sampling, max_n, rate_fraction, grid_step, cover_size, max_prefix } => {
            let sys = system(sa, config)?;
            let spec = SampleSpec { samples: sampling.samples, seed: sampling.seed, scenery: bias(&sampling.bias)? };
            let cfg = EstimateConfig { rate_fraction: *rate_fraction, grid_step: *grid_step, cover_size: *cover_size, max_prefix: *max_prefix };
            estimate(&sys, *max_n, &spec, &cfg, tau_of(sa))
        }
        Command::Rerun { .. } => Err(Failure::Usage("rerun cannot be nested".into())),
    }
}

fn digits(sys: &System, count: usize, config: &Config) -> Result<Outcome, Failure> {
    let mut pq = sys.quotients().clone();
    pq.extend_to(count, config.digit_budget)?;
    let conv = pq.convergents(count)?;
    let mut t = Table::new("digits", &["n", "a_n", "q_n", "q_n_decimal_digits"]);
    for n in 1..=count {
        let q = &conv[n].q;
        t.push(vec![s(n), s(pq.digit(n).expect("extended")), s(q), s(q.to_string().len())]);
    }
    let a: Vec<String> = (1..=count).map(|n| s(pq.digit(n).expect("extended"))).collect();
    Ok(Outcome { report: json!({ "rule": to_json(&pq.rule)?, "count": count, "digits": a }), tables: vec![t], pass: None })
}

fn convergents(sys: &System, n: usize) -> Result<Outcome, Failure> {
    sys.q(n)?;
    let conv = &sys.convergents()[..=n];
    let mut t = Table::new("convergents", &["n", "p_n", "q_n"]);
    for c in conv {
        t.push(vec![s(c.index), s(&c.p), s(&c.q)]);
    }
    Ok(Outcome { report: json!({ "convergents": to_json(&conv)? }), tables: vec![t], pass: None })
}

fn walk(sys: &System, theta: &str, n: u64, record: bool) -> Result<Outcome, Failure> {
    let th = Angle::rational(parse_rational(theta)?);
    let r = walk_record(sys, &th, n)?;
    let omega = *r.omega.last().expect("n >= 1");
    let mut tables = Vec::new();
    if record {
        let mut t = Table::new("walk", &["t", "omega"]);
        for (i, w) in r.omega.iter().enumerate() {
            t.push(vec![s(i + 1), s(w)]);
        }
        tables.push(t);
    }
    Ok(Outcome { report: json!({ "theta": theta, "n": n, "omega": omega, "max": r.max, "min": r.min }), tables, pass: None })
}

struct VerifyOpts {
    seed: u64,
    samples: usize,
    times: usize,
    exact_cap: u64,
    mode: Mode,
    members: usize,
}

fn keep_checks(mut r: Report, name: &str, global: bool) -> Report {
    r.checks.retain(|c| c.label.contains("global") == global);
    r.pass = r.checks.iter().all(|c| c.pass);
    r.proposition = name.into();
    r
}

fn verify(sys: &System, which: Which, range: &[usize], o: &VerifyOpts) -> Result<Outcome, Failure> {
    let mut checks = Table::new("checks", &["proposition", "n", "label", "pass", "computed", "expected"]);
    let mut reports = Vec::new();
    let mut tables = Vec::new();
    let mut pass = true;
    for &n in range {
        let report = match which {
            Which::Prop31 => verify_prop_qn(sys, n)?,
            Which::Prop32 => verify_prop_theta_qn(sys, n, &theta_samples(o.seed ^ n as u64, o.samples))?,
            Which::Prop33 | Which::Prop34 => {
                let thetas = theta_samples(o.seed ^ n as u64, o.samples);
                let times = sample_times(sys, n, o.times, o.seed)?;
                let full = verify_extreme_bounds(sys, n, &thetas, &times, o.exact_cap)?;
                if which == Which::Prop33 {
                    keep_checks(full, "prop33", false)
                } else {
                    keep_checks(full, "prop34", true)
                }
            }
            Which::Lemma42 => {
                let (r, t) = lemma(sys, n, o)?;
                tables.push(t);
                r
            }
        };
        pass &= report.pass;
        for c in &report.checks {
            checks.push(vec![report.proposition.clone(), s(n), c.label.clone(), s(c.pass), c.computed.to_string(), c.expected.to_string()]);
        }
        reports.push(report);
    }
    tables.insert(0, checks);
    Ok(Outcome { report: json!({ "pass": pass, "reports": to_json(&reports)? }), tables, pass: Some(pass) })
}

fn lemma(sys: &System, n: usize, o: &VerifyOpts) -> Result<(Report, Table), Failure> {
    let mode = match o.mode {
        Mode::Exact => RecurrenceMode::Exact,
        Mode::Constructive => RecurrenceMode::Constructive,
    };
    let r = recurrence_set(sys, n, mode)?;
    let members = verify_members(sys, &r, o.members, o.seed)?;
    let eighth = dwrs::Rational::new(1.into(), 8.into());
    let mut rep = Report::new(
        "lemma42",
        json!({ "n": n, "q_n": r.q_n, "L": r.l, "requested": r.requested, "mode": r.mode, "case": r.case, "breakpoints": r.breakpoints }),
    );
    rep.check(
        format!("measure >= 1/8 at n={n}"),
        json!({ "lo": format_rational(&r.set.measure_lo), "hi": format_rational(&r.set.measure_hi), "approx": r.set.measure_f64() }),
        json!(format_rational(&eighth)),
        r.certified_eighth,
    );
    let sampled_ok = r.l == 0 || (members.samples > 0 && members.misclassified == 0);
    rep.check(
        format!("sampled members satisfy omega(theta, i q_{n}) = i"),
        json!({ "samples": members.samples, "misclassified": members.misclassified, "examples": members.examples }),
        json!({ "misclassified": 0 }),
        sampled_ok,
    );
    rep.notes.extend(r.notes.iter().cloned());
    if r.parity_obstruction {
        rep.note("parity obstruction: q_n even");
    }
    if !r.regime_reached {
        rep.note("regime not reached");
    }
    let mut t = Table::new(&format!("arcs_n{n}"), &["index", "start", "end", "start_approx", "end_approx"]);
    for (i, a) in r.set.arcs.iter().enumerate() {
        t.push(vec![s(i), s(&a.start), s(&a.end), format!("{:.12}", a.start.to_f64(sys)), format!("{:.12}", a.end.to_f64(sys))]);
    }
    Ok((rep, t))
}

fn simulate(sys: &System, spec: &SampleSpec, fixed: Option<Angle>, times: &[u64]) -> Result<Outcome, Failure> {
    use rayon::prelude::*;
    let rows: Vec<Vec<_>> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let (theta, scenery) = spec.draw(i)?;
            let th = fixed.clone().unwrap_or(theta);
            coding_rows(sys, i, &th, &scenery, times)
        })
        .collect::<dwrs::Result<_>>()?;
    let mut t = Table::new("coding", &["sample_id", "time", "displacement", "label"]);
    let (mut lo, mut hi, mut a_count, mut total) = (0i64, 0i64, 0usize, 0usize);
    for r in rows.iter().flatten() {
        lo = lo.min(r.displacement);
        hi = hi.max(r.displacement);
        a_count += (r.label == 'A') as usize;
        total += 1;
        t.push(vec![s(r.sample_id), s(r.time), s(r.displacement), s(r.label)]);
    }
    let freq = if total > 0 { a_count as f64 / total as f64 } else { 0.0 };
    Ok(Outcome {
        report: json!({
            "samples": spec.samples, "times": times.len(), "spec": to_json(spec)?,
            "theta": fixed.map(|t| t.to_string()), "displacement_min": lo, "displacement_max": hi, "label_a_frequency": freq
        }),
        tables: vec![t],
        pass: None,
    })
}

fn build_f_cmd(sys: &System, max_n: usize) -> Result<Outcome, Failure> {
    let f = build_f(sys, max_n)?;
    let mut t = Table::new("f_blocks", &["n", "q_n", "l_n", "first", "last", "count_through", "end_value", "floor_value"]);
    let mut ends = Vec::new();
    for b in &f.blocks {
        let end = f.block_end_value(b.n)?;
        ends.push(end);
        t.push(vec![s(b.n), s(&b.q), s(&b.l), s(&b.q), s(b.last()), s(f.count_through(b.n)), format!("{end:.12}"), format!("{:.12}", f.block_floor_value(b.n)?)]);
    }
    let increasing = ends.windows(2).all(|w| w[0] < w[1]);
    Ok(Outcome { report: json!({ "f": to_json(&f)?, "block_end_values": ends, "increasing": increasing }), tables: vec![t], pass: None })
}

fn stage_table<T: std::fmt::Display>(stages: &[dwrs::complexity::sequence::Stage<T>]) -> Table {
    let mut t = Table::new("dimension", &["index", "s", "value"]);
    for st in stages {
        t.push(vec![s(&st.index), s(&st.s), format!("{:.12}", st.value)]);
    }
    t
}

fn dimension(seq: Seq, terms: u64, sa: &SystemArgs, config: &Config, max_n: usize, tail: f64) -> Result<Outcome, Failure> {
    let est = match seq {
        Seq::Squares => {
            let v: Vec<u64> = (1..=terms).map(|n| n.checked_mul(n).ok_or_else(|| Failure::Usage("--N too large".into()))).collect::<Result<_, _>>()?;
            sequence_dimension(&v, u64::MAX, tail)?
        }
        Seq::Identity => sequence_dimension(&(1..=terms).collect::<Vec<u64>>(), u64::MAX, tail)?,
        Seq::F => build_f(&system(sa, config)?, max_n)?.dimension(tail)?,
    };
    let last = est.stages.last().map(|s| s.value);
    let t = stage_table(&est.stages);
    Ok(Outcome {
        report: json!({ "upper": est.upper, "lower": est.lower, "tail_fraction": est.tail_fraction, "skipped": est.skipped, "stages": est.stages.len(), "last_value": last }),
        tables: vec![t],
        pass: None,
    })
}

fn complexity(what: &ComplexityCmd, config: &Config) -> Result<Outcome, Failure> {
    match what {
        ComplexityCmd::Words { system: sa, sampling, block, max_n, limit } => {
            let sys = system(sa, config)?;
            let f = build_f(&sys, *max_n)?;
            let n = block.unwrap_or(f.n0);
            let b = f.block(n).ok_or_else(|| Failure::Usage(format!("F has no block {n}")))?;
            let mut times = b.times()?;
            if let Some(l) = limit {
                times.truncate(*l);
            }
            let spec = SampleSpec { samples: sampling.samples, seed: sampling.seed, scenery: bias(&sampling.bias)? };
            let stages: Vec<usize> = (0..=times.len()).collect();
            let prof = complexity_profile(&sys, &times, &stages, &spec)?;
            let mut t = Table::new("complexity", &["stage", "k", "s_k", "count", "entropy", "log_count", "reliable"]);
            for e in &prof {
                t.push(vec![s(n), s(e.k), e.last_time.map(s).unwrap_or_default(), s(e.distinct), format!("{:.12}", e.entropy), format!("{:.12}", e.log_distinct), s(e.reliable)]);
            }
            let full = prof.last().expect("stage list is nonempty");
            Ok(Outcome {
                report: json!({
                    "block": n, "q_n": s(&b.q), "times": times.len(), "samples": spec.samples,
                    "distinct_lower_bound_on_cover": full.distinct, "entropy_nats": full.entropy,
                    "entropy_reference": times.len() as f64 / 8.0 * std::f64::consts::LN_2, "reliable": full.reliable
                }),
                tables: vec![t],
                pass: None,
            })
        }
        ComplexityCmd::Sturmian { system: sa, k_max, horizon } => {
            let sys = system(sa, config)?;
            let mut t = Table::new("sturmian", &["k", "count", "reference_2k", "k_plus_1", "stable"]);
            let mut rows = Vec::new();
            for k in 1..=*k_max {
                let f = sturmian_complexity(&sys, k, *horizon)?;
                t.push(vec![s(k), s(f.count), s(f.reference), s(k + 1), s(f.stable)]);
                rows.push(f);
            }
            Ok(Outcome { report: json!({ "horizon": horizon, "counts": to_json(&rows)? }), tables: vec![t], pass: None })
        }
        ComplexityCmd::Bounds { system: sa, k, max_n, cover_size, exponent } => {
            let sys = system(sa, config)?;
            let ks: Vec<u64> = match k {
                Some(k) => k.clone(),
                None => (2..=max_n + 1).map(|n| sys.q(n).map(|q| q.to_u64().unwrap_or(u64::MAX))).collect::<dwrs::Result<_>>()?,
            };
            let e = exponent.or(tau_of(sa).map(|t| t + 0.1)).unwrap_or(1.0);
            let rows = upper_bound_profile(&sys, &ks, *cover_size, e)?;
            let mut t = Table::new("bounds", &["k", "n", "extreme", "window", "bound", "ratio"]);
            for r in &rows {
                t.push(vec![s(r.k), s(r.n), s(r.extreme), s(r.window), format!("{:.12}", r.bound), format!("{:.12e}", r.ratio)]);
            }
            Ok(Outcome {
                report: json!({ "exponent": e, "rows": to_json(&rows)?, "thresholds": pair_thresholds(&rows), "ratio_nonincreasing": nonincreasing_at(&rows, e) }),
                tables: vec![t],
                pass: None,
            })
        }
    }
}

fn estimate(sys: &System, max_n: usize, spec: &SampleSpec, cfg: &EstimateConfig, tau: Option<f64>) -> Result<Outcome, Failure> {
    let b = estimate_entropy_dimension(sys, max_n, spec, cfg)?;
    let mut tables = Vec::new();
    if let Some(l) = &b.lower {
        let mut t = Table::new("estimate_growth", &["k", "time", "distinct", "rate", "stage_value"]);
        for g in &l.growth {
            t.push(vec![s(g.k), s(g.time), s(g.distinct), format!("{:.12}", g.rate), format!("{:.12}", g.stage_value)]);
        }
        tables.push(t);
    }
    if let Some(u) = &b.upper {
        let mut t = Table::new("estimate_bounds", &["k", "n", "window", "bound"]);
        for r in &u.rows {
            t.push(vec![s(r.k), s(r.n), s(r.window), format!("{:.12}", r.bound)]);
        }
        tables.push(t);
    }
    let report = json!({
        "lower": b.lower.as_ref().map(|l| l.value),
        "lower_prefix": b.lower.as_ref().map(|l| l.prefix),
        "upper": b.upper.as_ref().and_then(|u| u.value),
        "thresholds": b.upper.as_ref().map(|u| u.thresholds.clone()),
        "tau": tau,
        "bracket_contains_tau": tau.map(|t| b.contains(t)),
        "n0": b.n0,
        "notes": b.notes,
        "config": to_json(&b.config)?,
        "samples": spec.samples,
        "seed": spec.seed,
    });
    Ok(Outcome { report, tables, pass: None })
}
