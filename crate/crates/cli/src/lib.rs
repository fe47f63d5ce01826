//! Command-line driver: every run writes a manifest, a JSON report and CSV
//! tables, and a manifest re-run reproduces the tables byte for byte.

mod args;
mod commands;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use dwrs::Error;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// A CSV table under `tables/`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub tables: Vec<Table>,
    /// `Some(false)` marks a failed verification.
    pub pass: Option<bool>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_code(f: &Failure) -> i32 {
    match f {
        Failure::Usage(_) => EXIT_USAGE,
        Failure::Io(_) => EXIT_USAGE,
        Failure::Lib(Error::InvalidTau(_) | Error::InvalidInput(_) | Error::OutOfRange { .. }) => EXIT_USAGE,
        Failure::Lib(_) => EXIT_BUDGET,
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: &'a [String],
    parameters: Value,
    config: &'a dwrs::system::Config,
    tool_version: &'a str,
    timestamp: u64,
}

// flags that never change results and are not recorded
const LOCAL_FLAGS: [&str; 2] = ["--out", "--workers"];
const BUDGET_FLAGS: [&str; 5] = ["--step-budget", "--sweep-cap", "--depth-cap", "--max-digits", "--table-cap"];

/// `argv` without the program name, local flags and budget flags; the
/// resolved budgets are appended so a re-run does not depend on the
/// environment.
fn canonical_argv(argv: &[String], config: &dwrs::system::Config) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        let drop = LOCAL_FLAGS.iter().chain(BUDGET_FLAGS.iter()).find(|f| a == *f || a.starts_with(&format!("{f}=")));
        match drop {
            Some(f) if a == *f => i += 2,
            Some(_) => i += 1,
            None => {
                out.push(a.clone());
                i += 1;
            }
        }
    }
    out.extend([
        format!("--step-budget={}", config.step_budget),
        format!("--sweep-cap={}", config.sweep_cap),
        format!("--depth-cap={}", config.depth_cap),
        format!("--max-digits={}", config.digit_budget.max_decimal_digits),
        format!("--table-cap={}", config.table_cap),
    ]);
    out
}

fn write_outputs(dir: &Path, manifest: &Manifest, outcome: &Outcome) -> Result<(), Failure> {
    fs::create_dir_all(dir.join("tables"))?;
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(manifest)? + "\n")?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&outcome.report)? + "\n")?;
    for t in &outcome.tables {
        let mut w = csv::Writer::from_path(dir.join("tables").join(format!("{}.csv", t.name)))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn execute(cli: Cli, argv: &[String]) -> Result<i32, Failure> {
    if let args::Command::Rerun { manifest } = &cli.command {
        return rerun(manifest, cli.out.clone(), cli.workers);
    }
    let config = commands::config(&cli.budgets);
    let name = commands::name(&cli.command);
    let outcome = match cli.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build().map_err(|e| Failure::Usage(e.to_string()))?;
            pool.install(|| commands::dispatch(&cli.command, &config))?
        }
        None => commands::dispatch(&cli.command, &config)?,
    };
    let recorded = canonical_argv(argv, &config);
    let manifest = Manifest {
        command: name,
        argv: &recorded,
        parameters: serde_json::to_value(&cli.command)?,
        config: &config,
        tool_version: env!("CARGO_PKG_VERSION"),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    match &cli.out {
        Some(dir) => {
            write_outputs(dir, &manifest, &outcome)?;
            println!("{name}: {}", summary(&outcome));
        }
        None => println!("{}", serde_json::to_string_pretty(&outcome.report)?),
    }
    Ok(if outcome.pass == Some(false) { EXIT_FAILED } else { EXIT_OK })
}

fn summary(o: &Outcome) -> String {
    match o.pass {
        Some(true) => "pass".into(),
        Some(false) => "FAIL".into(),
        None => "done".into(),
    }
}

fn rerun(path: &Path, out: Option<PathBuf>, workers: Option<usize>) -> Result<i32, Failure> {
    let text = fs::read_to_string(path)?;
    let m: Value = serde_json::from_str(&text)?;
    let recorded: Vec<String> = m
        .get("argv")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Usage(format!("{} has no argv", path.display())))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| Failure::Usage("argv entries must be strings".into())))
        .collect::<Result<_, _>>()?;
    let mut argv = vec!["dwrs".to_string()];
    argv.extend(recorded);
    if let Some(d) = out {
        argv.push(format!("--out={}", d.display()));
    }
    if let Some(w) = workers {
        argv.push(format!("--workers={w}"));
    }
    Ok(run(argv))
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let strings: Vec<String> = raw.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    match execute(cli, &strings) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            exit_code(&f)
        }
    }
}

#[cfg(test)]
mod tests;
