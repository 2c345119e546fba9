use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bmsynth::machine::{verify_against, BinaryMachine};
use bmsynth::seq::parse_sequence;

fn bmsynth(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmsynth"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const WORKED: &str = "00110111001011101100";

#[test]
fn synth_writes_a_verified_machine() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), format!("# worked sequence\n{WORKED}\n")).unwrap();
    let o = bmsynth(dir.path(), &["synth", "--seq", "a.txt", "-p", "2", "--perm", "lfsr:13:1", "--out", "m"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert!(line.starts_with("stages=6 ") && line.trim_end().ends_with("verify=pass"), "{line}");

    let json = fs::read_to_string(dir.path().join("m/machine.json")).unwrap();
    let m = BinaryMachine::import_json(&json).unwrap();
    assert!(verify_against(&m, &parse_sequence(WORKED).unwrap(), 2).unwrap().is_pass());
    let text = fs::read_to_string(dir.path().join("m/machine.txt")).unwrap();
    assert!(text.starts_with("# binary machine k=6 p=2 initial=000100"));
}

#[test]
fn synth_baseline_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("b.txt"), "00101101\n").unwrap();
    let o = bmsynth(dir.path(), &["synth", "--seq", "b.txt", "-p", "2", "--algorithm", "baseline"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("stages=2 "));
    assert!(dir.path().join("machine.json").exists());

    let o = bmsynth(dir.path(), &["synth", "--seq", "b.txt", "-p", "sweep", "--out", "s"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("p="));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "01Z1\n").unwrap();
    fs::write(dir.path().join("short.txt"), "0\n").unwrap();
    assert_eq!(bmsynth(dir.path(), &["synth", "--seq", "bad.txt"]).status.code(), Some(2));
    assert_eq!(bmsynth(dir.path(), &["synth", "--seq", "missing.txt"]).status.code(), Some(2));
    assert_eq!(bmsynth(dir.path(), &["synth", "--seq", "short.txt"]).status.code(), Some(2));
    assert_eq!(bmsynth(dir.path(), &["synth", "--seq", "bad.txt", "--algorithm", "magic"]).status.code(), Some(1));
    assert_eq!(bmsynth(dir.path(), &["frobnicate"]).status.code(), Some(1));
    for sub in ["synth", "bench", "sweep", "analyze", "compare"] {
        assert_eq!(bmsynth(dir.path(), &[sub, "--help"]).status.code(), Some(0), "{sub}");
    }
}

#[test]
fn sweep_lists_every_p() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), WORKED).unwrap();
    let o = bmsynth(dir.path(), &["sweep", "--seq", "a.txt", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 5);
    assert!(!csv.contains("elapsed"));
    assert_eq!(fs::read_to_string(dir.path().join("r/sweep.csv")).unwrap(), csv);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r/sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);

    let timed = bmsynth(dir.path(), &["sweep", "--seq", "a.txt", "--timing", "--p-min", "2", "--p-max", "3"]);
    assert!(stdout(&timed).starts_with("p,stages,gates,status,elapsed_ms"));
    assert_eq!(stdout(&timed).lines().count(), 3);
}

#[test]
fn bench_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.txt"), "n = 128\nfractions = 0, 0.5, 0.99\ntrials = 2\nseed = 3\n").unwrap();
    let first = bmsynth(dir.path(), &["bench", "--config", "c.txt", "--out", "one"]);
    let second = bmsynth(dir.path(), &["bench", "--config", "c.txt", "--out", "two"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    for name in ["bench.csv", "bench.json"] {
        let a = fs::read(dir.path().join("one").join(name)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("two").join(name)).unwrap(), "{name}");
    }
    assert_eq!(stdout(&first).lines().count(), 1 + 6 + 3);

    let reseeded = bmsynth(dir.path(), &["bench", "--config", "c.txt", "--seed", "4", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&reseeded.stdout).unwrap();
    assert_eq!(json["seed"], 4);

    fs::write(dir.path().join("bad.txt"), "n = 4\n").unwrap();
    assert_eq!(bmsynth(dir.path(), &["bench", "--config", "bad.txt"]).status.code(), Some(2));
}

#[test]
fn analyze_profile_and_plan() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "1XX0XXXX\n11011XX0\nXXXXXXX1\nX0XXXXXX\n").unwrap();
    let o = bmsynth(dir.path(), &["analyze", "--patterns", "p.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("pattern_index,specified_bits,specified_fraction\n"));
    assert!(csv.contains("\n1,6,0.750000\n"));

    let o = bmsynth(dir.path(), &["analyze", "--patterns", "p.txt", "--drop", "0.25", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r/analyze.json")).unwrap()).unwrap();
    assert_eq!(json["plan"]["dropped"], serde_json::json!([1]));
    assert_eq!(bmsynth(dir.path(), &["analyze", "--patterns", "p.txt", "--drop", "0.5", "--budget", "3"]).status.code(), Some(1));
    assert_eq!(bmsynth(dir.path(), &["analyze", "--patterns", "p.txt", "--drop", "1.5"]).status.code(), Some(2));
}

#[test]
fn compare_reports_both_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), WORKED).unwrap();
    let o = bmsynth(dir.path(), &["compare", "--seq", "a.txt", "-p", "2", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("baseline: p=2 stages=4"));
    assert!(lines[1].starts_with("presented: p=2 stages=6"));
    assert!(lines[2].starts_with("reduction_percent="));
    assert!(dir.path().join("r/compare.csv").exists());
}
