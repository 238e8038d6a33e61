use std::path::Path;
use std::process::{Command, Output};

use mo_tracking::harness::parse_csv;
use mo_tracking::PwcControl;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mo-tracking"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--cache")
        .arg("none")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_wsm_writes_a_control() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["solve-wsm", "--alpha", "0.5,0.5", "--level", "3"],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("converged   true"));
    let u = PwcControl::read(&dir.path().join("control_wsm_0.5_0.5_L3.ctl")).unwrap();
    assert_eq!(u.level(), 3);
    assert!(u.values().iter().all(|v| (-7.0..=15.0).contains(v)));
}

#[test]
fn solve_rpm_honours_the_diagonal_flag() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "solve-rpm",
        "--zeta",
        "15,1",
        "--level",
        "2",
        "--diagonal",
        "rising",
    ];
    let o = run(dir.path(), &args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let u = PwcControl::read(&dir.path().join("control_rpm_15_1_L2.ctl")).unwrap();
    assert_eq!(u.mesh().diagonal(), mo_tracking::Diagonal::Rising);
}

#[test]
fn iteration_cap_exits_with_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "solve-wsm",
            "--alpha",
            "0.5,0.5",
            "--level",
            "4",
            "--max-iter",
            "1",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_input_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve-wsm", "--alpha", "0.5,0.7"][..],
        &["solve-wsm", "--alpha", "nope"],
        &["solve-wsm", "--alpha", "0.5,0.5", "--bounds", "3,1"],
        &["front", "--method", "sideways"],
        &["convergence", "--method", "wsm", "--levels", "4,3"],
    ] {
        assert_eq!(run(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn front_and_ideal_vector() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "front",
            "--method",
            "wsm",
            "--level",
            "3",
            "--front-size",
            "5",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let data = parse_csv(&dir.path().join("front_wsm_0.1_0.1.csv")).unwrap();
    assert_eq!(data.rows.len(), 5);

    let o = run(dir.path(), &["ideal-vector", "--level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Vec<f64> = stdout(&o)
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(v.len(), 2);
    let j1 = data.column("j1").unwrap();
    let j2 = data.column("j2").unwrap();
    for r in 0..data.rows.len() {
        assert!(data.float(r, j1).unwrap().unwrap() >= v[0] - 1e-6);
        assert!(data.float(r, j2).unwrap().unwrap() >= v[1] - 1e-6);
    }
}

#[test]
fn convergence_study_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(
        &cfg,
        "# small study\nlevels = 2,3\nref-level = 5\njobs = 2\n",
    )
    .unwrap();
    let o = run(
        dir.path(),
        &[
            "convergence",
            "--method",
            "wsm",
            "--alphas",
            "0.2,0.8;0.8,0.2",
            "--config",
            cfg.to_str().unwrap(),
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let data = parse_csv(&dir.path().join("convergence_wsm.csv")).unwrap();
    assert_eq!(data.header, ["h", "alpha_0.2_0.8", "alpha_0.8_0.2"]);
    assert_eq!(data.rows.len(), 3);

    let missing = run(
        dir.path(),
        &["ideal-vector", "--config", "/nonexistent/study.cfg"],
    );
    assert_eq!(missing.status.code(), Some(1));
}
