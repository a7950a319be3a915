use std::process::Command;

fn nadiff(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nadiff")).args(args).env_remove("NADIFF_SUITE").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn empty_suite_succeeds() {
    let (code, out, _) = nadiff(&["run", "--suite", "none"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"summary":{"failed":0,"passed":0,"suites":[],"total":0}}"#);
}

#[test]
fn passing_suite_exits_zero_and_writes_report() {
    let path = std::env::temp_dir().join(format!("nadiff-report-{}.jsonl", std::process::id()));
    let (code, _, err) = nadiff(&["run", "--suite", "stirling", "--precision", "16", "--no-timing", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 35);
    assert!(!text.contains("elapsed_us"));
    std::fs::remove_file(path).ok();
}

#[test]
fn failing_suite_exits_one() {
    let (code, out, _) = nadiff(&["run", "--suite", "eta", "--no-timing"]);
    assert_eq!(code, 1);
    assert!(out.lines().any(|l| l.contains("\"status\":\"FAIL\"")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nadiff(&["run", "--suite", "bogus"]).0, 2);
    assert_eq!(nadiff(&["run", "--prime", "6"]).0, 2);
    assert_eq!(nadiff(&["--frobnicate"]).0, 2);
    let (code, _, err) = nadiff(&["mahler", "expand", "p=2", "x^^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error at"), "{err}");
}

#[test]
fn corrupted_fixtures_exit_two() {
    let path = std::env::temp_dir().join(format!("nadiff-fixtures-{}.json", std::process::id()));
    std::fs::write(&path, "{\"polys\": [[1, \"a\"]]}").unwrap();
    let (code, _, err) = nadiff(&["run", "--suite", "mahler", "--fixtures", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    std::fs::remove_file(path).ok();
}

#[test]
fn environment_overrides_flags_defaults() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_nadiff")).args(["tower", "project", "k=1", "x+1"]).env("NADIFF_PRIME", "5").output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "(0 1 2 3 4)");
}

#[test]
fn compute_prints_the_spec_examples() {
    assert_eq!(nadiff(&["mahler", "expand", "p=2", "N=8", "x^2"]).1.trim(), "[0,1,2,0,0,0,0,0,0]");
    assert_eq!(nadiff(&["tower", "project", "p=3", "k=1", "x+1"]).1.trim(), "(0 1 2)");
    let (code, out, _) = nadiff(&["calculus", "leibniz", "n=1", "f=x", "g=x"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"status\":\"PASS\",\"margin\":0"));
}
