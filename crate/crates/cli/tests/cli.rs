use std::collections::BTreeMap;
use std::process::{Command, Output};

use embedded_trees::label_marks::s_general_system;
use embedded_trees::leaf_depths::dary_leaf_depth_table;
use embedded_trees::oracle::{oracle_small_labels, OracleConfig};
use embedded_trees::ternary::dary_count;
use embedded_trees::trees::StepSet;
use num_bigint::BigInt;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embedded-trees"))
        .args(args)
        .env_remove("EMBEDDED_TREES_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

type Table = BTreeMap<(usize, u64, Vec<u32>), BigInt>;

fn parse_profile(s: &str) -> Vec<u32> {
    s.split(';').map(|x| x.parse().unwrap()).collect()
}

#[test]
fn small_label_sequences() {
    assert_eq!(
        stdout(&["seq", "small-label", "--j", "0", "--n-max", "6"]),
        "1,1,2,6,22,91,408\n"
    );
    assert_eq!(
        stdout(&["seq", "small-label", "--j", "1", "--n-max", "6"]),
        "1,1,3,11,46,209,1006\n"
    );
}

#[test]
fn small_label_by_system_for_other_arities() {
    for d in [2usize, 4] {
        let d_arg = d.to_string();
        let out = stdout(&["seq", "small-label", "--d", &d_arg, "--j", "0", "--n-max", "6"]);
        let steps = StepSet::natural(d).unwrap();
        let cfg = OracleConfig::default();
        let oracle: Vec<String> = (0..=6)
            .map(|n| oracle_small_labels(&steps, 0, n, &cfg).unwrap().to_string())
            .collect();
        assert_eq!(out, format!("{}\n", oracle.join(",")));
    }
}

#[test]
fn ternary_counts() {
    assert_eq!(
        stdout(&["seq", "count", "--d", "3", "--n-max", "5"]),
        "1,1,3,12,55,273\n"
    );
}

#[test]
fn power_coefficients() {
    // Catalan numbers shifted: [z^n] C(z)^2
    assert_eq!(
        stdout(&["seq", "power-coeff", "--d", "2", "--k", "2", "--n-max", "5"]),
        "1,2,5,14,42,132\n"
    );
}

#[test]
fn large_values_are_exact() {
    let out = stdout(&["seq", "count", "--n-max", "60"]);
    let last = out.trim().rsplit(',').next().unwrap();
    assert_eq!(last, dary_count(3, 60).to_string());
    assert!(!out.contains('e'));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "unknown"]).status.code(), Some(2));
    assert_eq!(run(&["seq", "unknown"]).status.code(), Some(2));
    assert_eq!(run(&["seq", "count", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["seq", "small-label", "--j", "-3"]).status.code(), Some(2));
    assert_eq!(run(&["seq", "label-mark", "--d", "2"]).status.code(), Some(2));
}

#[test]
fn verify_leaf_depths_passes() {
    let out = run(&["verify", "leaf-depths", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("0 mismatches\n"));
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "all", "--cap", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_embedded-trees"))
        .args(["verify", "small-labels", "--format", "json-lines"])
        .env("EMBEDDED_TREES_CAP", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let summary: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["parameters"]["n_max"], "4");
    assert_eq!(summary["passed"], true);
}

#[test]
fn verify_json_lines_report() {
    let text = stdout(&["verify", "cardano", "--format", "json-lines"]);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["cases"], lines.len() - 1);
    assert_eq!(summary["mismatches"], 0);
    assert!(lines[..lines.len() - 1]
        .iter()
        .all(|c| c["status"] == "match" && c["suite"] == "cardano"));
}

#[test]
fn verify_csv_report() {
    let text = stdout(&["verify", "gen1", "--m", "1", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["suite", "case", "status", "expected", "actual", "witness"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| &r[0] == "gen1" && &r[2] == "match"));
}

#[test]
fn leaf_depth_csv_round_trip() {
    let text = stdout(&["seq", "leaf-depth", "--d", "3", "--n-max", "5", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["family", "n", "s", "m", "value"]);
    let mut parsed = Table::new();
    for r in rdr.records() {
        let r = r.unwrap();
        assert_eq!(&r[0], "leaf-depth");
        let key = (r[1].parse().unwrap(), r[2].parse().unwrap(), parse_profile(&r[3]));
        parsed.insert(key, r[4].parse().unwrap());
    }
    let mut expected = Table::new();
    for n in 0..=5 {
        for ((s, m), c) in dary_leaf_depth_table(3, n as u64) {
            expected.insert((n, s, m.0), c);
        }
    }
    assert_eq!(parsed, expected);
}

#[test]
fn leaf_depth_json_round_trip() {
    let text = stdout(&[
        "seq",
        "leaf-depth",
        "--d",
        "4",
        "--n-max",
        "4",
        "--format",
        "json-lines",
    ]);
    let mut parsed = Table::new();
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["family"], "leaf-depth");
        let m = v["m"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as u32)
            .collect();
        let key = (v["n"].as_u64().unwrap() as usize, v["s"].as_u64().unwrap(), m);
        parsed.insert(key, v["value"].as_str().unwrap().parse().unwrap());
    }
    let mut expected = Table::new();
    for n in 0..=4 {
        for ((s, m), c) in dary_leaf_depth_table(4, n as u64) {
            expected.insert((n, s, m.0), c);
        }
    }
    assert_eq!(parsed, expected);
}

#[test]
fn label_mark_json_round_trip() {
    let text = stdout(&[
        "seq",
        "label-mark",
        "--j",
        "-1",
        "--m",
        "2",
        "--n-max",
        "6",
        "--format",
        "json-lines",
    ]);
    let family = s_general_system(2, 6).unwrap();
    let series = family.get(-1);
    let mut count = 0;
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v.get("s").is_none());
        let e: Vec<u32> = v["m"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as u32)
            .collect();
        let n = v["n"].as_u64().unwrap() as usize;
        let value: BigInt = v["value"].as_str().unwrap().parse().unwrap();
        assert_eq!(
            series.coeff(n).coefficient(&e),
            embedded_trees::series::Coefficient::from_integer(value)
        );
        count += 1;
    }
    let terms: usize = (0..=6).map(|n| series.coeff(n).num_terms()).sum();
    assert_eq!(count, terms);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["seq", "leaf-depth", "--n-max", "6", "--format", "csv"][..],
        &["seq", "label-mark", "--j", "2", "--m", "1", "--n-max", "8"][..],
        &["verify", "label-marks", "--n-max", "5", "--format", "json-lines"][..],
    ] {
        assert_eq!(stdout(args), stdout(args));
    }
}
