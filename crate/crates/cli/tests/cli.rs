use std::process::{Command, Output};

use twistor_lab::{run, RunConfig, Status, Suite};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistor-lab")).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn quick_run_passes_with_exit_zero() {
    let out = lab(&["--rank", "5", "--multiplicity", "2", "--samples", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("overall: PASS"));
}

#[test]
fn json_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.json", "b.json"].iter().map(|f| dir.path().join(f)).collect();
    for path in &paths {
        let out = lab(&[
            "--rank", "6", "--multiplicity", "2", "--samples", "5", "--seed", "11", "--format", "json", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);
    let json: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(json["schema"], "twistor-lab-report/1");
    assert_eq!(json["config"]["dim"], 16);
    assert_eq!(json["suites"].as_array().unwrap().len(), 8);
}

#[test]
fn different_seeds_give_different_reports() {
    let a = lab(&["--rank", "5", "--samples", "3", "--suites", "curvature", "--format", "json", "--seed", "1"]);
    let b = lab(&["--rank", "5", "--samples", "3", "--suites", "curvature", "--format", "json", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn csv_rows_are_identities_plus_one_summary_per_suite() {
    let out = lab(&["--rank", "5", "--multiplicity", "2", "--samples", "3", "--suites", "curvature,kaehler", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();

    let config = RunConfig {
        rank: 5,
        multiplicity: 2,
        samples: 3,
        suites: vec![Suite::Curvature, Suite::Kaehler],
        ..RunConfig::default()
    };
    let report = run(&config).unwrap();
    let identities: usize = report.suites.iter().map(|s| s.rows.len()).sum();
    assert_eq!(records.len(), identities + report.suites.len());
    assert_eq!(records.iter().filter(|r| &r[1] == "summary").count(), 2);
    assert!(records.iter().all(|r| r[9] == *"pass" || r[9] == *"passed"));
}

#[test]
fn dimension_eight_skips_theorem_suites() {
    let out = lab(&["--rank", "7", "--samples", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["dim"], 8);
    for suite in json["suites"].as_array().unwrap() {
        let name = suite["suite"].as_str().unwrap();
        if ["integrability", "kaehler", "nearly-kaehler"].contains(&name) {
            assert_eq!(suite["status"], "skipped");
            assert_eq!(suite["reason"], "hypothesis not met: n = 8 excluded");
        } else {
            assert_eq!(suite["status"], "passed", "{name}");
        }
    }
}

#[test]
fn low_rank_skips_theorem_suites() {
    let config = RunConfig { rank: 4, multiplicity: 2, samples: 2, ..RunConfig::default() };
    let report = run(&config).unwrap();
    for s in &report.suites {
        let expected = if s.suite.is_theorem() { Status::Skipped } else { Status::Passed };
        assert_eq!(s.status, expected, "{}: {:?}", s.suite, s.reason);
    }
    assert_eq!(report.exit_code(), 0);
}

#[test]
fn empty_selection_echoes_config_only() {
    let out = lab(&["--suites", "", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["suites"].as_array().unwrap().is_empty());
    assert_eq!(json["config"]["rank"], 9);
    let csv = lab(&["--suites", "", "--format", "csv"]);
    assert_eq!(stdout(&csv).lines().count(), 1);
}

#[test]
fn impossible_tolerance_fails_with_exit_one() {
    let out = lab(&["--rank", "5", "--samples", "2", "--suites", "curvature", "--tolerance", "curvature=1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("overall: FAIL"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["--rank", "2"][..],
        &["--rank", "17"],
        &["--multiplicity", "0"],
        &["--samples", "0"],
        &["--suites", "bogus"],
        &["--tolerance", "kaehler"],
        &["--format", "yaml"],
        &["--t-values", "0"],
        &["--rank", "x"],
    ] {
        let out = lab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn thread_variable_is_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_twistor-lab"))
        .args(["--suites", "curvature", "--samples", "2"])
        .env("TWISTOR_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let good = Command::new(env!("CARGO_BIN_EXE_twistor-lab"))
        .args(["--rank", "5", "--suites", "curvature", "--samples", "2", "--format", "json"])
        .env("TWISTOR_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(good.status.code(), Some(0));
    let plain = lab(&["--rank", "5", "--suites", "curvature", "--samples", "2", "--format", "json"]);
    assert_eq!(good.stdout, plain.stdout);
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("report.json");
    let out = lab(&["--rank", "5", "--suites", "lemma", "--samples", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn timings_only_with_flag() {
    let without = lab(&["--rank", "5", "--suites", "lemma", "--samples", "2", "--format", "json"]);
    let with = lab(&["--rank", "5", "--suites", "lemma", "--samples", "2", "--format", "json", "--timings"]);
    let a: serde_json::Value = serde_json::from_slice(&without.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&with.stdout).unwrap();
    assert!(a.get("timings").is_none());
    assert!(b["timings"]["lemma"].is_number());
}
