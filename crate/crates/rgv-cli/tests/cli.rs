//! End-to-end checks of the binary: exit codes, CSV round trips, and
//! reproducibility of seeded runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rgv"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rgv-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const BSC_CONFIG: &str = r#"{
  "channel": { "W": [[0.9, 0.1], [0.1, 0.9]] },
  "input": { "P": [0.5, 0.5] },
  "metric": { "kind": "ml" },
  "distance": { "kind": "bhattacharyya" },
  "delta_cap": 0.12,
  "delta": 0.0001,
  "rate": { "grid": { "start": 0.02, "stop": 0.1, "points": 3 } }
}"#;

const USELESS_CONFIG: &str = r#"{
  "channel": { "W": [[0.5, 0.5], [0.5, 0.5]] },
  "input": { "P": [0.5, 0.5] },
  "metric": { "kind": "ml" },
  "distance": { "kind": "hamming" },
  "delta_cap": -0.1,
  "delta": 0.0001,
  "rate": { "single": 0.05 }
}"#;

const SIM_CONFIG: &str = r#"{
  "channel": { "W": [[0.9, 0.1], [0.1, 0.9]] },
  "input": { "P": [0.5, 0.5] },
  "metric": { "kind": "ml" },
  "distance": { "kind": "hamming" },
  "delta_cap": 0.25,
  "delta": 0.05,
  "rate": { "single": 0.2 },
  "code": { "n": 4, "messages": 3 }
}"#;

fn parse_csv(stdout: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn exponent_useless_channel_is_all_zero() {
    let dir = tempdir();
    let cfg = write_config(&dir, "useless.json", USELESS_CONFIG);
    let out = run(&["exponent", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = parse_csv(&out.stdout);
    assert_eq!(rows[0][0], "R");
    let row = &rows[1];
    for col in 1..=5 {
        let v: f64 = row[col].parse().unwrap();
        assert!(v.abs() <= 1e-6, "column {col} = {v}");
    }
    assert_eq!(row[8], "ok");
}

#[test]
fn exponent_primal_dual_columns_agree() {
    let dir = tempdir();
    let cfg = write_config(&dir, "bsc.json", BSC_CONFIG);
    let out = run(&["exponent", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    for row in parse_csv(&out.stdout).iter().skip(1) {
        let e_primal: f64 = row[1].parse().unwrap();
        let e_dual: f64 = row[2].parse().unwrap();
        assert!((e_primal - e_dual).abs() <= 1e-2);
        let rlp: f64 = row[6].parse().unwrap();
        let rld: f64 = row[7].parse().unwrap();
        assert!((rlp - rld).abs() <= 1e-3);
    }
}

#[test]
fn exponent_flags_rate_condition_violations() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "fast.json",
        &BSC_CONFIG.replace(
            r#""rate": { "grid": { "start": 0.02, "stop": 0.1, "points": 3 } }"#,
            r#""rate": { "single": 0.6 }"#,
        ),
    );
    let out = run(&["exponent", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = parse_csv(&out.stdout);
    assert_eq!(rows[1][8], "rate-condition-violated");
}

#[test]
fn csv_round_trips_at_full_precision() {
    let dir = tempdir();
    let cfg = write_config(&dir, "bsc2.json", BSC_CONFIG);
    let out = run(&["exponent", "--config", cfg.to_str().unwrap()]);
    for row in parse_csv(&out.stdout).iter().skip(1) {
        for cell in &row[..8] {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().unwrap();
            let reformatted = format!("{v:.16e}");
            let reparsed: f64 = reformatted.parse().unwrap();
            assert_eq!(v.to_bits(), reparsed.to_bits(), "cell {cell}");
        }
    }
}

#[test]
fn simulate_is_byte_identical_for_fixed_seed() {
    let dir = tempdir();
    let cfg = write_config(&dir, "sim.json", SIM_CONFIG);
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--trials",
            "20000",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn simulate_exact_matches_sampling() {
    let dir = tempdir();
    let cfg = write_config(&dir, "sim2.json", SIM_CONFIG);
    let exact = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--exact",
    ]);
    assert!(exact.status.success());
    let sampled = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--trials",
        "100000",
    ]);
    assert!(sampled.status.success());
    let pe_exact: f64 = parse_csv(&exact.stdout)[1][4].parse().unwrap();
    let pe_mc: f64 = parse_csv(&sampled.stdout)[1][4].parse().unwrap();
    let sigma = (pe_exact * (1.0 - pe_exact) / 100_000.0).sqrt();
    assert!((pe_mc - pe_exact).abs() <= 3.0 * sigma);
}

#[test]
fn simulate_rejects_zero_trials() {
    let dir = tempdir();
    let cfg = write_config(&dir, "sim3.json", SIM_CONFIG);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn codebook_serializes_with_header() {
    let dir = tempdir();
    let cfg = write_config(&dir, "cb.json", SIM_CONFIG);
    let out = run(&["codebook", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "4 3 2 5");
    let words: Vec<Vec<usize>> = lines
        .map(|l| l.split(' ').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(words.len(), 3);
    for w in &words {
        assert_eq!(w.iter().filter(|&&s| s == 0).count(), 2);
    }
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempdir();
    let cfg = write_config(&dir, "bad.json", "{\n  \"channel\": [1,\n}");
    let out = run(&["exponent", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("line"),
        "diagnostic should carry a line: {msg}"
    );
}

#[test]
fn unknown_verify_suite_exits_2_and_lists_suites() {
    let out = run(&["verify", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("lemmas") && msg.contains("duality"));
}

#[test]
fn verify_lemmas_passes() {
    let out = run(&["verify", "lemmas"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
