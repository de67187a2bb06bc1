//! End-to-end tests of the command-line interface: file formats, the
//! exit-code contract, and byte-level determinism of reports.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ensemble-game"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    fs::write(dir.join(name), content).unwrap();
}

#[test]
fn solve_table1_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "table1", "--out", "inst"], dir.path());
    assert!(out.status.success(), "{out:?}");

    let out = run(&["solve", "inst/F.csv", "--b", "inst/b.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "optimal");
    assert!((report["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for g in report["g"].as_array().unwrap() {
        assert!((g.as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    run(&["generate", "table1", "--out", "inst"], dir.path());
    let args = [
        "solve",
        "inst/F.csv",
        "--b",
        "inst/b.json",
        "--method",
        "sgd",
        "--iters",
        "500",
        "--seed",
        "9",
        "--out",
        "report.json",
    ];
    run(&args, dir.path());
    let first = fs::read(dir.path().join("report.json")).unwrap();
    run(&args, dir.path());
    let second = fs::read(dir.path().join("report.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn infeasible_bounds_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    // z1 - z2 >= 2 forces z = (1,-1), contradicting z1 + z2 >= 1
    write(dir.path(), "F.csv", "1,-1\n1,1\n");
    write(dir.path(), "b.json", "[1.0, 0.5]");
    let out = run(&["solve", "F.csv", "--b", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "infeasible");
    assert_eq!(report["value"], serde_json::Value::Null);
}

#[test]
fn parse_errors_exit_with_code_one_and_location() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "F.csv", "1,-1\n0.5,oops\n");
    write(dir.path(), "b.json", "[0.1, 0.1]");
    let out = run(&["solve", "F.csv", "--b", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2, column 2"), "stderr: {stderr}");

    // out-of-range entries are input errors too
    write(dir.path(), "F2.csv", "2,0\n");
    write(dir.path(), "b1.json", "[0.5]");
    let out = run(&["solve", "F2.csv", "--b", "b1.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0,0)"));
}

#[test]
fn non_convergence_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // case B's minimum sits at a kink, so the subgradient never
    // vanishes and a 50-step run cannot claim convergence
    run(&["generate", "caseB", "--out", "inst"], dir.path());
    let out = run(
        &[
            "solve",
            "inst/F.csv",
            "--b",
            "inst/b.json",
            "--method",
            "subgradient",
            "--iters",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "non_converged");
    // the reported value is still a valid guarantee for the reported g
    assert!(report["duality_gap"].as_f64().unwrap() >= -1e-6);
}

#[test]
fn generate_random_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "random", "--p", "5", "--n", "100", "--seed", "7", "--out", "a",
    ];
    run(&args, dir.path());
    let mut args_b = args;
    args_b[9] = "b";
    run(&args_b, dir.path());
    for name in ["F.csv", "b.json", "z_true.json"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across identical seeds");
    }
    let meta = fs::read_to_string(dir.path().join("a/meta.json")).unwrap();
    assert!(meta.contains("\"seed\": 7"));
}

#[test]
fn generate_cyclic_flips_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "generate", "cyclic", "--p", "7", "--flips", "2,5", "--out", "c",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let z: Vec<f64> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("c/z_true.json")).unwrap())
            .unwrap();
    assert_eq!(z, vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
}

#[test]
fn estimate_b_reports_bounds_and_penalties() {
    let dir = tempfile::tempdir().unwrap();
    // one classifier right on 3 of 4 points, plus the label row
    write(dir.path(), "train.csv", "1,-1,1,1\n1,1,1,1\n");
    let out = run(
        &["estimate-b", "train.csv", "--delta", "0.1", "--n", "4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eps_s = parsed["eps_s"].as_f64().unwrap();
    let eps_u = parsed["eps_u"].as_f64().unwrap();
    assert_eq!(eps_s, eps_u); // m = n here
    let b = parsed["b"][0].as_f64().unwrap();
    assert!((b - (0.5 - eps_s - eps_u).max(0.0)).abs() < 1e-12);
}

#[test]
fn solve_accepts_labeled_input_for_bounds() {
    let dir = tempfile::tempdir().unwrap();
    run(&["generate", "caseA", "--out", "inst"], dir.path());
    // labeled set: the same three classifiers on 40 training points,
    // all predicted and labeled +1, so corr_S = 1 for everyone
    let row = vec!["1"; 40].join(",");
    let labeled = format!("{row}\n{row}\n{row}\n{row}\n");
    write(dir.path(), "train.csv", &labeled);
    let out = run(
        &[
            "solve",
            "inst/F.csv",
            "--labeled",
            "train.csv",
            "--delta",
            "0.2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["delta"].as_f64().unwrap(), 0.2);
    assert!(report["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn evaluate_prints_correlation_and_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.json", "[1, -1, 1]");
    write(dir.path(), "z.json", "[1, -1, -1]");
    let out = run(&["evaluate", "g.json", "z.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let corr = parsed["correlation"].as_f64().unwrap();
    let err = parsed["error"].as_f64().unwrap();
    assert!((corr - 1.0 / 3.0).abs() < 1e-12);
    assert!((err - 1.0 / 3.0).abs() < 1e-12);

    write(dir.path(), "short.json", "[1]");
    let out = run(&["evaluate", "g.json", "short.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn baselines_match_the_bloc_example() {
    let dir = tempfile::tempdir().unwrap();
    run(&["generate", "table1", "--out", "inst"], dir.path());

    let out = run(
        &["baseline", "inst/F.csv", "--b", "inst/b.json", "--kind", "erm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let erm: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(erm, vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0]);

    let out = run(
        &[
            "baseline", "inst/F.csv", "--kind", "majority", "--subset", "0,1,2",
        ],
        dir.path(),
    );
    let vote: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(vote, vec![1.0; 6]);

    let out = run(&["baseline", "inst/F.csv", "--kind", "majority"], dir.path());
    let all: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(all, vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0]);
}

#[test]
fn noise_profile_shrinks_reported_value_never_below_base() {
    let dir = tempfile::tempdir().unwrap();
    // clipping instance: staggered magnitudes, bound needs the strong column
    write(dir.path(), "F.csv", "1,0.9,0.8,0.7\n");
    write(dir.path(), "b.json", "[0.35]");
    write(dir.path(), "noise.json", "[0.5, 0.5, 0.5, 0.5]");
    let base = run(&["solve", "F.csv", "--b", "b.json"], dir.path());
    let noisy = run(
        &["solve", "F.csv", "--b", "b.json", "--noise", "noise.json"],
        dir.path(),
    );
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(noisy.status.code(), Some(0));
    let vb: serde_json::Value = serde_json::from_slice(&base.stdout).unwrap();
    let vn: serde_json::Value = serde_json::from_slice(&noisy.stdout).unwrap();
    assert!(vn["value"].as_f64().unwrap() > vb["value"].as_f64().unwrap());
}

#[test]
fn timing_flag_populates_the_field() {
    let dir = tempfile::tempdir().unwrap();
    run(&["generate", "caseA", "--out", "inst"], dir.path());
    let out = run(
        &["solve", "inst/F.csv", "--b", "inst/b.json", "--timing"],
        dir.path(),
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timing_ms"].is_u64());
}
