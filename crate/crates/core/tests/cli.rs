use std::path::Path;
use std::process::{Command, Output};

fn kmeq(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmeq"))
        .args(args)
        .env("KMEQ_OUT", out)
        .output()
        .expect("spawn kmeq")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: [&str; 10] = ["--family", "gaussian", "--m", "40", "--n", "8", "--p", "8", "--q", "40"];

#[test]
fn solve_prints_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let mut args = vec!["solve"];
    args.extend(SMALL);
    args.extend(["--method", "arbk", "--tau-a", "10", "--tau-b", "10", "--rse-tol", "1e-6"]);
    args.extend(["--trace", trace.to_str().unwrap()]);
    let o = kmeq(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["method"], "arbk");
    assert_eq!(v["termination"], "tolerance_reached");
    assert!(v["rse"].as_f64().unwrap() <= 1e-6);
    assert!(v["iterations"].as_u64().unwrap() >= 1);
    let csv = std::fs::read_to_string(trace).unwrap();
    assert!(csv.starts_with("iteration,rse\n0,"));
}

#[test]
fn generate_then_solve_from_directory() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let mut args = vec!["generate", "--seed", "3", "--out", inst.to_str().unwrap()];
    args.extend(SMALL);
    let o = kmeq(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["A.csv", "B.csv", "F.csv", "X_star.csv", "instance.json"] {
        assert!(inst.join(f).is_file(), "{f} missing");
    }
    let o = kmeq(
        &["solve", "--instance", inst.to_str().unwrap(), "--method", "cme_rk", "--max-iters", "50000"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 40);
    assert_eq!(v["termination"], "tolerance_reached");
}

#[test]
fn bench_writes_summary_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let mut args = vec!["bench", "--trials", "3", "--output-dir", out.to_str().unwrap()];
    args.extend(SMALL);
    args.extend(["--method", "arbk:10:10", "--method", "cme_rk"]);
    let o = kmeq(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some(kmeq::harness::SUMMARY_HEADER));
    assert!(lines.next().unwrap().starts_with("arbk,10,10,3,"));
    assert!(lines.next().unwrap().starts_with("cme_rk,,,3,"));
    assert!(out.join("config.json").is_file());
    assert!(out.join("traces").join("arbk_10_10_trial000.csv").is_file());
    assert!(stdout(&o).contains("ARBK(10,10)"));
}

#[test]
fn bounds_rejects_oversized_instances() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmeq(
        &[
            "bounds", "--family", "gaussian", "--m", "5000", "--n", "10", "--p", "10", "--q", "50", "--method",
            "arbk:50:5",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("too large"), "{}", stderr(&o));
}

#[test]
fn bounds_writes_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["bounds", "--trials", "5", "--bound-iters", "10", "--method", "arbk:10:10"];
    args.extend(SMALL);
    let o = kmeq(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(csv.starts_with("k,empirical,bound\n"));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn surfaces_export_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmeq(&["surfaces", "--m", "6", "--q", "5", "--out", dir.path().to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("surface1_6x5.csv").is_file());
    assert!(dir.path().join("surface2_6x5.csv").is_file());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmeq(&["solve", "--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = kmeq(&["bench", "--method", "arbk:x:1", "--family", "gaussian"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let mut args = vec!["bench", "--method", "arbk:100:10"];
    args.extend(SMALL);
    let o = kmeq(&args, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("kmeq: error:"));
}
