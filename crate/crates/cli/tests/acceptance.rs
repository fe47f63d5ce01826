//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::fs;
use std::path::Path;
use std::time::Instant;

use dwrs::cf::Tau;
use dwrs::complexity::{build_f, sturmian_complexity, upper_bound_profile, word_complexity, SampleSpec};
use dwrs::rotation::recurrence::{recurrence_set, verify_members, RecurrenceMode};
use dwrs::rotation::verify::{sample_times, verify_extreme_bounds, verify_prop_qn, verify_prop_theta_qn};
use dwrs::sampling::theta_samples;
use dwrs::system::{Config, System};
use dwrs::{Rational, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn tau_half() -> Result<System> {
    System::for_tau(Tau::new(1, 2)?, Config::default())
}

fn golden() -> Result<System> {
    System::golden(Config::default())
}

fn systems() -> Result<Vec<(&'static str, System)>> {
    Ok(vec![("golden", golden()?), ("tau=1/2", tau_half()?)])
}

// indices n >= 1 whose q_n (or q_{n+1} with `ahead`) fits in the step budget
fn feasible(sys: &System, ahead: bool) -> Vec<usize> {
    let budget = sys.config().step_budget;
    let shift = ahead as usize;
    (1..sys.max_index())
        .take_while(|&n| sys.q(n + shift).ok().and_then(|q| q.to_u64()).is_some_and(|q| q <= budget))
        .collect()
}

fn c1() -> Result<Outcome> {
    let start = Instant::now();
    let t = tau_half()?;
    let a: Vec<String> = (1..=4).map(|n| t.quotients().digit(n).map(|d| d.to_string()).unwrap_or_default()).collect();
    let q: Vec<String> = (0..=4).map(|n| t.q(n).map(|d| d.to_string())).collect::<Result<_>>()?;
    let secs = start.elapsed().as_secs_f64();
    let ok = a == ["5", "11", "113", "12667"] && q == ["1", "5", "56", "6333", "80220167"] && secs < 1.0;
    Ok(outcome(ok, format!("a={a:?} q={q:?} in {secs:.3}s")))
}

fn c2() -> Result<Outcome> {
    let g = golden()?;
    let mut bad = Vec::new();
    for n in 1..=12 {
        if !verify_prop_qn(&g, n)?.pass {
            bad.push(format!("golden n={n}"));
        }
    }
    let t = tau_half()?;
    let mut slow = 0.0;
    for n in 1..=4 {
        let start = Instant::now();
        if !verify_prop_qn(&t, n)?.pass {
            bad.push(format!("tau n={n}"));
        }
        if n == 4 {
            slow = start.elapsed().as_secs_f64();
        }
    }
    let ok = bad.is_empty() && slow < 60.0;
    Ok(outcome(ok, format!("golden n=1..12, tau=1/2 n=1..4, mismatches {bad:?}, n=4 in {slow:.2}s")))
}

fn c3() -> Result<Outcome> {
    let thetas = theta_samples(SEED, 1000);
    let mut checked = 0;
    let mut failed = Vec::new();
    let mut part3 = 0;
    for (name, sys) in systems()? {
        for n in feasible(&sys, false) {
            let r = verify_prop_theta_qn(&sys, n, &thetas)?;
            checked += 1;
            part3 += r.checks.len() - 1;
            if !r.pass {
                failed.push(format!("{name} n={n}"));
            }
        }
    }
    Ok(outcome(
        failed.is_empty(),
        format!("{checked} (system, n) pairs x 1000 angles, {part3} part (3) ranges, failures {failed:?}"),
    ))
}

fn c4() -> Result<Outcome> {
    let mut failed = Vec::new();
    let mut min_pairs = usize::MAX;
    let mut exact = 0;
    let mut count = 0;
    for (name, sys) in systems()? {
        for n in feasible(&sys, true) {
            let times = sample_times(&sys, n, 10, SEED)?;
            let k = 100usize.div_ceil(times.len()).max(10);
            let thetas = theta_samples(SEED ^ n as u64, k);
            let r = verify_extreme_bounds(&sys, n, &thetas, &times, 10_000_000)?;
            min_pairs = min_pairs.min(thetas.len() * times.len());
            exact += r.checks.iter().filter(|c| c.label.starts_with("max(M(0")).count();
            count += 1;
            if !r.pass {
                failed.push(format!("{name} n={n}"));
            }
        }
    }
    let ok = failed.is_empty() && min_pairs >= 100;
    Ok(outcome(ok, format!("{count} (system, n) pairs, >= {min_pairs} (theta,t) each, {exact} exact lower bounds, failures {failed:?}")))
}

fn c5() -> Result<Outcome> {
    let t = tau_half()?;
    let eighth = Rational::new(BigInt::from(1), BigInt::from(8));
    let exact = recurrence_set(&t, 2, RecurrenceMode::Exact)?;
    let exact_ok = exact.mode == RecurrenceMode::Exact && exact.set.measure_at_least(&eighth);
    let mut parts = vec![format!(
        "exact n=2 measure {:.6} ({})",
        exact.set.measure_f64(),
        if exact_ok { "ok" } else { "below 1/8" }
    )];
    let mut ok = exact_ok;
    for n in [2, 3] {
        let r = recurrence_set(&t, n, RecurrenceMode::Constructive)?;
        let m = verify_members(&t, &r, 1000, SEED)?;
        let this = r.certified_eighth && m.samples >= 1000 && m.misclassified == 0;
        ok &= this;
        parts.push(format!(
            "constructive n={n} certificate {} members {} misclassified {}",
            r.certified_eighth, m.samples, m.misclassified
        ));
    }
    Ok(outcome(ok, parts.join("; ")))
}

fn c6() -> Result<Outcome> {
    let f = build_f(&tau_half()?, 4)?;
    let v: Vec<f64> = (2..=4).map(|n| f.block_end_value(n)).collect::<Result<_>>()?;
    let target = 1064f64.ln() / 6_681_315f64.ln();
    let ok = (v[1] - target).abs() <= 1e-6 && v.windows(2).all(|w| w[0] < w[1]);
    Ok(outcome(ok, format!("stage values n=2..4 {v:?}, target {target:.9}")))
}

fn c7() -> Result<Outcome> {
    let start = Instant::now();
    let t = tau_half()?;
    let f = build_f(&t, 3)?;
    let block = f.block(2).ok_or_else(|| dwrs::Error::InvalidInput("F has no block 2".into()))?;
    let times = block.times()?;
    let e = word_complexity(&t, &times, &SampleSpec::fair(20_000, SEED))?;
    let secs = start.elapsed().as_secs_f64();
    let floor = 0.9 * 9.0 / 8.0 * 2f64.ln();
    let ok = times.len() == 9 && e.entropy >= floor && e.distinct >= 400 && secs < 300.0;
    Ok(outcome(
        ok,
        format!(
            "{} times, {} samples, entropy {:.4} (floor {floor:.4}), distinct {} of 512 (need 400), {secs:.1}s",
            times.len(),
            e.samples,
            e.entropy,
            e.distinct
        ),
    ))
}

fn c8() -> Result<Outcome> {
    let mut off = Vec::new();
    for (name, sys) in systems()? {
        for k in 1..=20 {
            let c = sturmian_complexity(&sys, k, 1_000_000)?;
            if c.count != k + 1 {
                off.push(format!("{name} k={k}: {}", c.count));
            }
        }
    }
    let shown: Vec<&String> = off.iter().take(4).collect();
    Ok(outcome(off.is_empty(), format!("{} of 40 counts differ from k+1, e.g. {shown:?}", off.len())))
}

fn c9() -> Result<Outcome> {
    let t = tau_half()?;
    let ks: Vec<u64> = (2..=4).map(|n| t.q_steps(n)).collect::<Result<_>>()?;
    let rows = upper_bound_profile(&t, &ks, 2, 0.6)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let ok = ratios.windows(2).all(|w| w[1] < w[0]);
    Ok(outcome(ok, format!("bound/k^0.6 at {ks:?}: {ratios:?}")))
}

fn tables(dir: &Path) -> std::io::Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir.join("tables"))? {
        let e = e?;
        out.push((e.file_name().to_string_lossy().into_owned(), fs::read(e.path())?));
    }
    out.push(("report.json".into(), fs::read(dir.join("report.json"))?));
    out.sort();
    Ok(out)
}

fn c10() -> std::io::Result<Outcome> {
    let runs: [&[&str]; 5] = [
        &["simulate", "--tau", "1/2", "--samples", "40", "--seed", "3", "--t-max", "300"],
        &["verify", "prop32", "--golden", "--max-n", "14", "--samples", "200", "--seed", "5"],
        &["verify", "lemma42", "--tau", "1/2", "--n", "3", "--member-samples", "50"],
        &["complexity", "words", "--tau", "1/2", "--block", "2", "--samples", "3000", "--seed", "11"],
        &["estimate", "--tau", "1/2", "--max-n", "3", "--samples", "2000", "--seed", "7"],
    ];
    let root = tempfile::tempdir()?;
    let mut differ = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let a = root.path().join(format!("{i}-a"));
        let b = root.path().join(format!("{i}-b"));
        let c = root.path().join(format!("{i}-c"));
        let mut first = vec!["dwrs".to_string()];
        first.extend(args.iter().map(|s| s.to_string()));
        let mut second = first.clone();
        first.extend(["--workers=1".into(), format!("--out={}", a.display())]);
        second.extend(["--workers=4".into(), format!("--out={}", b.display())]);
        let codes = [
            dwrs_cli::run(first),
            dwrs_cli::run(second),
            dwrs_cli::run([
                "dwrs".to_string(),
                "rerun".into(),
                a.join("manifest.json").display().to_string(),
                format!("--out={}", c.display()),
                "--workers=2".into(),
            ]),
        ];
        let (ta, tb, tc) = (tables(&a)?, tables(&b)?, tables(&c)?);
        if ta != tb || ta != tc || codes[0] != codes[1] || codes[0] != codes[2] {
            differ.push(args[0].to_string());
        }
    }
    Ok(outcome(differ.is_empty(), format!("{} commands, workers 1/4 and manifest re-run; differing {differ:?}", runs.len())))
}

fn main() {
    let criteria: [(&str, fn() -> std::result::Result<Outcome, String>); 10] = [
        ("exact construction", || c1().map_err(|e| e.to_string())),
        ("omega(q_n) parity values", || c2().map_err(|e| e.to_string())),
        ("omega(theta,q_n) value sets", || c3().map_err(|e| e.to_string())),
        ("running extreme bounds", || c4().map_err(|e| e.to_string())),
        ("recurrence set measure", || c5().map_err(|e| e.to_string())),
        ("F stage values", || c6().map_err(|e| e.to_string())),
        ("block entropy and word count", || c7().map_err(|e| e.to_string())),
        ("factor count k+1", || c8().map_err(|e| e.to_string())),
        ("upper bound envelope", || c9().map_err(|e| e.to_string())),
        ("determinism", || c10().map_err(|e| e.to_string())),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        failed += !o.pass as usize;
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
