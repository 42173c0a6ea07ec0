use std::path::Path;
use std::process::{Command, Output};

fn moufang(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moufang")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn build_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["build", "paige:q=2", "--out", "m2.loop"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("order 120"));
    assert!(out.contains("moufang yes"));
    assert!(out.contains("associative no witness="));
    let text = std::fs::read_to_string(dir.path().join("m2.loop")).unwrap();
    assert!(text.starts_with("loop-table v1\norder 120\nnames "));

    let o = moufang(dir.path(), &["build", "gd:F2,all", "--out", "gd2.loop"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order 24"));
}

#[test]
fn oversized_loops_become_handles() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["build", "gd:F3,all", "--cap", "100", "--seed", "3", "--out", "h.loop"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("h.loop")).unwrap();
    assert_eq!(text, "loop-handle v1\ndescriptor gd:Fp:3,all\nseed 3\norder 432\n");
    let o = moufang(dir.path(), &["check", "h.loop", "--suite", "moufang,formulas", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS abelian-formula-product"));
}

#[test]
fn rank_three_module_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["build", "wreathmod:F2,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("triality fails at n=3"));
    let o = moufang(dir.path(), &["check-triality", "wreathmod:F2,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL triality-axiom"));
    let o = moufang(dir.path(), &["check-triality", "wreathmod:F2,2,all"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    moufang(dir.path(), &["build", "paige:q=2", "--out", "m2.loop"]);
    let o = moufang(dir.path(), &["check", "m2.loop", "--suite", "moufang,dxy"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("PASS\n"));

    // A loop of order 5 that is not a group, hence not Moufang.
    let corrupted = "loop-table v1\norder 5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
    std::fs::write(dir.path().join("corrupted.loop"), corrupted).unwrap();
    let o = moufang(dir.path(), &["check", "corrupted.loop", "--suite", "moufang"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL moufang-law witness=("));

    let o = moufang(dir.path(), &["check", "m2.loop", "--suite", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    let o = moufang(dir.path(), &["check", "gd:F6,all"]);
    assert_eq!(o.status.code(), Some(2));
    let o = moufang(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = moufang(dir.path(), &["check", "missing.loop"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check", "catalog:gl2-semidirect,q=3", "--suite", "all", "--seed", "5", "--budget", "3000"];
    let a = moufang(dir.path(), &args);
    let b = moufang(dir.path(), &[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn minimal_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["minimal", "catalog:gl2-semidirect,q=2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("nontrivial yes"));
    assert!(out.contains("minimal yes"));

    moufang(dir.path(), &["export", "gd:F3,diag", "--out", "d3.loop"]);
    let o = moufang(dir.path(), &["minimal", "d3.loop", "--kernel", "0,1,2,3,4,5,6,7,8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("nontrivial no associative"));
    let o = moufang(dir.path(), &["minimal", "d3.loop"]);
    assert_eq!(o.status.code(), Some(2));
    let o = moufang(dir.path(), &["minimal", "d3.loop", "--kernel", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kernel is not closed"));
}

#[test]
fn survey_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["survey", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# survey bound=3 q=2,3 seed=0\n# construction order kernel nontrivial minimal witness\n");

    let o = moufang(dir.path(), &["survey", "--bound", "500", "--q", "3,2", "--out", "r.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert_eq!(report, stdout(&o));
    let rows: Vec<&str> = report.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("catalog:gl2-semidirect,2 24 4 nontrivial=y minimal=y witness="));
    assert!(rows[0].contains("nontrivial=n"));

    let o = moufang(dir.path(), &["survey", "--bound", "10", "--q", "two"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_respects_cap() {
    let dir = tempfile::tempdir().unwrap();
    let o = moufang(dir.path(), &["export", "paige:q=3", "--cap", "500", "--out", "m3.loop"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds the materialization cap"));
    let o = moufang(dir.path(), &["export", "wreathmod:F2,2,all", "--out", "a.loop"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order 24"));
}
