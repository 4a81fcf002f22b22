use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcc::instance::read_instance;
use qcc::schedule::{read_schedule, validate};

fn qcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcc")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_byte_for_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = qcc(&["gen", "--chip", "rigetti-8", "--goals", "5", "--variant", "qcc-x", "--stages", "2", "--count", "3", "--seed", "11", "--out-dir", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        let inst = read_instance(a.join(&name)).unwrap();
        assert_eq!(inst.goals().len(), 5);
        assert_eq!(inst.stages(), 2);
    }
}

#[test]
fn gen_by_density_on_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcc(&["gen", "--chip", "grid:3:blue", "--density", "0.25", "--out-dir", s(dir.path())]);
    assert!(o.status.success());
    let path = String::from_utf8(o.stdout).unwrap();
    let inst = read_instance(path.trim()).unwrap();
    assert_eq!(inst.goals().len(), 9); // a quarter of 36 pairs
}

#[test]
fn validate_accepts_the_bundled_example() {
    let o = qcc(&["validate", s(&data("worked-example.instance.json")), s(&data("worked-example.schedule.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("valid"));
}

#[test]
fn validate_rejects_an_early_gate() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data("worked-example.schedule.json")).unwrap()).unwrap();
    for t in doc["tasks"].as_array_mut().unwrap() {
        if t["kind"] == "ps" {
            t["start"] = serde_json::json!(t["start"].as_u64().unwrap() - 1);
        }
    }
    let bad = dir.path().join("bad.schedule.json");
    fs::write(&bad, doc.to_string()).unwrap();
    let o = qcc(&["validate", s(&data("worked-example.instance.json")), s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("[R1]") || out.contains("[R4]"), "{out}");
}

#[test]
fn solve_writes_a_valid_schedule_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcc(&["solve", s(&data("worked-example.instance.json")), "--engine", "last", "--node-budget", "5000", "--out-dir", s(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = read_instance(data("worked-example.instance.json")).unwrap();
    let sched = read_schedule(dir.path().join("worked-example.last.schedule.json")).unwrap();
    assert!(validate(&inst, &sched).valid);
    assert_eq!(sched.makespan, 5);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("worked-example.last.report.json")).unwrap()).unwrap();
    assert_eq!(report["engine"], "last");
    assert_eq!(report["stages"].as_array().unwrap().len(), 2);
}

#[test]
fn bench_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite");
    let o = qcc(&["gen", "--chip", "grid:2", "--goals", "2", "--count", "3", "--out-dir", s(&suite)]);
    assert!(o.status.success());
    let out = dir.path().join("out");
    let o = qcc(&["bench", s(&suite), "--engine", "router", "--engine", "half", "--node-budget", "3000", "--workers", "2", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("results.txt")).unwrap();
    assert!(table.contains("(3)"), "{table}");
    assert_eq!(fs::read_dir(out.join("runs")).unwrap().count(), 6);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert!(json["cells"].is_object());
}

#[test]
fn gantt_draws_text_and_svg() {
    let inst = data("worked-example.instance.json");
    let sched = data("worked-example.schedule.json");
    let o = qcc(&["gantt", s(&inst), s(&sched)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("BBB"), "{text}");
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("chart.svg");
    let o = qcc(&["gantt", s(&inst), s(&sched), "--format", "svg", "--out", s(&svg)]);
    assert!(o.status.success());
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(qcc(&["gen", "--chip", "rigetti-8"]).status.code(), Some(2));
    assert_eq!(qcc(&["solve", "missing.json"]).status.code(), Some(2));
    assert_eq!(qcc(&["gen", "--chip", "nowhere", "--goals", "1"]).status.code(), Some(2));
    assert!(qcc(&["--help"]).status.success());
}
