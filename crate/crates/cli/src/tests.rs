use std::fs;
use std::path::Path;

use crate::{run, EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn argv(args: &[&str], out: Option<&Path>) -> Vec<String> {
    let mut v = vec!["dwrs".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    if let Some(d) = out {
        v.push(format!("--out={}", d.display()));
    }
    v
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run(argv(&["verify", "prop31", "--tau", "1/2", "--n", "2"], None)), EXIT_OK);
    assert_eq!(run(argv(&["digits", "--tau", "1/2", "--count", "3", "--count", "4"], None)), EXIT_USAGE);
    assert_eq!(run(argv(&["digits", "--tau", "3/2"], None)), EXIT_USAGE);
    assert_eq!(run(argv(&["digits", "--tau", "1/2", "--golden"], None)), EXIT_USAGE);
    assert_eq!(run(argv(&["digits", "--tau", "1/2", "--count", "12"], None)), EXIT_BUDGET);
    assert_eq!(run(argv(&["walk", "--tau", "1/2", "--n", "2000", "--step-budget", "1000"], None)), EXIT_BUDGET);
    let parity = ["verify", "lemma42", "--tau", "1/2", "--n", "2", "--mode", "constructive", "--member-samples", "20"];
    assert_eq!(run(argv(&parity, None)), EXIT_FAILED);
}

#[test]
fn output_layout() {
    let d = tempfile::tempdir().unwrap();
    let code = run(argv(&["build-f", "--tau", "1/2", "--max-n", "3"], Some(d.path())));
    assert_eq!(code, EXIT_OK);
    let m = json(&d.path().join("manifest.json"));
    assert_eq!(m["command"], "build-f");
    let recorded: Vec<&str> = m["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(recorded.contains(&"--step-budget=1000000000"), "{recorded:?}");
    assert!(!recorded.iter().any(|a| a.starts_with("--out")));
    assert!(m["timestamp"].as_u64().unwrap() > 0);
    assert!(d.path().join("report.json").is_file());
    let csv = fs::read_to_string(d.path().join("tables/f_blocks.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3, "{csv}");
    assert!(rows[1].starts_with("2,56,9"), "{csv}");
}

#[test]
fn squares_dimension_table() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(argv(&["dimension", "--seq", "squares", "--N", "1000"], Some(d.path()))), EXIT_OK);
    let r = json(&d.path().join("report.json"));
    let upper = r["upper"].as_f64().unwrap();
    assert!((upper - 0.5).abs() < 0.01, "{r}");
}

#[test]
fn simulate_rows_and_rerun() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a");
    let b = d.path().join("b");
    let args = ["simulate", "--golden", "--samples", "5", "--seed", "9", "--times", "0,1,2,3,10,100"];
    assert_eq!(run(argv(&args, Some(&a))), EXIT_OK);
    let coding = fs::read_to_string(a.join("tables/coding.csv")).unwrap();
    assert_eq!(coding.lines().count(), 1 + 5 * 6);
    for line in coding.lines().skip(1) {
        let label = line.rsplit(',').next().unwrap();
        assert!(label == "A" || label == "a", "{line}");
    }
    let manifest = a.join("manifest.json").display().to_string();
    assert_eq!(run(argv(&["rerun", &manifest, "--workers", "2"], Some(&b))), EXIT_OK);
    assert_eq!(coding, fs::read_to_string(b.join("tables/coding.csv")).unwrap());
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
    let (ma, mb) = (json(&a.join("manifest.json")), json(&b.join("manifest.json")));
    assert_eq!(ma["argv"], mb["argv"]);
    assert_eq!(ma["config"], mb["config"]);
}

#[test]
fn rerun_of_a_missing_manifest_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let missing = d.path().join("nope.json").display().to_string();
    assert_eq!(run(argv(&["rerun", &missing], None)), EXIT_USAGE);
}
