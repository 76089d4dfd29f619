use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dturan::blowup::WeightedBlowupGraph;

fn dturan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dturan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("path3.g"), "3; 1-2 2-3\n").unwrap();
    fs::write(dir.path().join("k3.g"), "3; 1-2 1-3 2-3\n").unwrap();
    fs::write(dir.path().join("star5.g"), "5; 1-2 1-3 1-4 1-5\n").unwrap();
    dir
}

#[test]
fn verdict_exit_codes() {
    let dir = setup();
    let d = dir.path();
    let o = dturan(d, &["decide-tree", "path3.g", "--densities", "1/2,1/2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NotEnsured"));
    assert!(stdout(&o).contains("violating edge: 2-3"));
    assert_eq!(code(&dturan(d, &["decide-tree", "path3.g", "--densities", "0.51"])), 0);
    assert_eq!(code(&dturan(d, &["triangle", "0.8", "0.8", "0.8"])), 0);
    assert_eq!(code(&dturan(d, &["triangle", "1", "1", "0"])), 1);
    assert_eq!(code(&dturan(d, &["verify-bt1", "--n", "2", "--m", "3", "--tol", "1e-9"])), 0);
    assert_eq!(code(&dturan(d, &["verify-bowtie"])), 0);
}

#[test]
fn input_errors_exit_two() {
    let dir = setup();
    let d = dir.path();
    fs::write(d.join("bad.d"), "1-2 0.5\n2-3 zero\n").unwrap();
    let o = dturan(d, &["decide-tree", "path3.g", "--density-file", "bad.d"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    fs::write(d.join("broken.g"), "3; 1-2 2-9\n").unwrap();
    assert_eq!(code(&dturan(d, &["dcrit-tree", "broken.g"])), 2);
    assert_eq!(code(&dturan(d, &["dcrit-tree", "missing.g"])), 2);
    assert_eq!(code(&dturan(d, &["decide-tree", "k3.g", "--densities", "0.5"])), 2);
    assert_eq!(code(&dturan(d, &["triangle", "0.5", "2", "0.5"])), 2);
    assert_eq!(code(&dturan(d, &["no-such-command"])), 2);
    assert_eq!(code(&dturan(d, &["bounds", "path3.g", "--format", "xml"])), 2);
}

#[test]
fn limits_exit_three() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(code(&dturan(d, &["oracle-dcrit", "k3.g", "--budget", "1"])), 3);
    assert_eq!(code(&dturan(d, &["oracle-search", "k3.g", "--densities", "0.6", "--budget", "1"])), 3);
    assert_eq!(code(&dturan(d, &["verify-bt1", "--n", "9", "--m", "1"])), 3);
}

#[test]
fn constructions_round_trip() {
    let dir = setup();
    let d = dir.path();
    for args in [
        vec!["construct", "star5.g", "--tree", "--out", "c.json"],
        vec!["construct", "k3.g", "--labeling", "(1,2,3)", "--densities", "0.6", "--out", "c.json"],
        vec!["oracle-search", "k3.g", "--densities", "0.6", "--q", "10", "--out", "c.json"],
    ] {
        assert_eq!(code(&dturan(d, &args)), 0, "{args:?}");
        let text = fs::read_to_string(d.join("c.json")).unwrap();
        let b = WeightedBlowupGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(WeightedBlowupGraph::from_json(&b.to_json()).unwrap(), b);
        let o = dturan(d, &["check-transversal", "c.json", "--oracle"]);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(stdout(&o).contains("no transversal"));
    }
    assert_eq!(
        code(&dturan(d, &["construct", "k3.g", "--labeling", "(1,2,3)", "--densities", "0.7"])),
        1
    );
}

#[test]
fn json_records_are_single_lines() {
    let dir = setup();
    let d = dir.path();
    let o = dturan(d, &["--format", "json", "star-check", "k3.g", "--densities", "0.7"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 6);
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(&l).unwrap();
        assert_eq!(v["command"], "star-check");
        assert_eq!(v["check"], "PassesThisLabeling");
    }
    let o = dturan(d, &["--format", "json", "dcrit-tree", "star5.g"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["exact"], "3/4");
}

#[test]
fn parallel_runs_are_deterministic() {
    let dir = setup();
    let d = dir.path();
    let args = |t: &'static str| {
        vec!["--threads", t, "--format", "json", "oracle-search", "k3.g", "--densities", "0.61", "--q", "50"]
    };
    let one = dturan(d, &args("1"));
    let four = dturan(d, &args("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&four));
    let a = dturan(d, &["--threads", "1", "star-bound", "k3.g"]);
    let b = dturan(d, &["--threads", "3", "star-bound", "k3.g"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn checkpoint_resumes() {
    let dir = setup();
    let d = dir.path();
    let args = ["oracle-search", "k3.g", "--densities", "0.6", "--q", "10", "--checkpoint", "ck.json", "--progress", "log.jsonl"];
    let first = dturan(d, &args);
    assert_eq!(code(&first), 0);
    let log = fs::read_to_string(d.join("log.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(log.lines().last().unwrap()).unwrap();
    assert_eq!(last["verdict"], "found");
    let second = dturan(d, &args);
    assert_eq!(stdout(&first), stdout(&second));
    let log = fs::read_to_string(d.join("log.jsonl")).unwrap();
    // the resumed run starts at the configuration that was found
    assert_eq!(log.lines().last().unwrap(), log.lines().nth(log.lines().count() - 2).unwrap());
    let other = dturan(d, &["oracle-search", "k3.g", "--densities", "0.5", "--checkpoint", "ck.json"]);
    assert_eq!(code(&other), 2);
}

#[test]
fn self_test_single_criterion() {
    let dir = setup();
    let o = dturan(dir.path(), &["self-test", "--criterion", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PASS  3"));
}
