use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uzawa-bench"))
}

#[test]
fn export_problem_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let st = bench()
        .args(["export-problem", "stokes:n=4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    for f in ["A.mtx", "B.mtx", "D.mtx", "f.mtx", "g.mtx", "meta.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn errors_exit_with_two() {
    let st = bench().args(["table", "table9"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bench()
        .args(["export-problem", "heat:n=3", "--out", "/nonexistent/x"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn run_appends_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("runs.cfg");
    std::fs::write(
        &cfg,
        "name=a\nproblem=random-qp:n=10,m=4,eps=0.5,seed=1\na_hat=jacobi\ns_hat=scaled-identity:1\n\nname=b\nproblem=stokes:n=6\na_hat=exact\ns_hat=pressure-mass\ntheta=0.5\nstop=max-rel-1e-6\n",
    )
    .unwrap();
    let results = dir.path().join("results.txt");
    for _ in 0..2 {
        let out = bench()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--results")
            .arg(&results)
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let text = std::fs::read_to_string(results).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text
        .lines()
        .all(|l| l.starts_with("version=inexact-uzawa/")));
}

#[test]
fn bad_config_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(
        &cfg,
        "problem=stokes:n=6\na_hat=cholesky\ns_hat=pressure-mass\n",
    )
    .unwrap();
    let out = bench()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cholesky"));
}

#[test]
fn verify_theory_small_corpus() {
    let out = bench()
        .args(["verify-theory", "--count", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn table_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}"));
        let st = bench()
            .args(["table", "table4", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        csv.push(std::fs::read(out.join("table4.csv")).unwrap());
        assert!(out.join("table4.timings.csv").exists());
    }
    assert_eq!(csv[0], csv[1]);
    assert!(!String::from_utf8_lossy(&csv[0]).contains("ERROR"));
}
