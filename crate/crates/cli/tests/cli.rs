use std::path::{Path, PathBuf};
use std::process::Command;

use qpencil_cli::run::{RunReport, Status};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qpencil(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_qpencil"))
        .args(args)
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn run_to(dir: &Path, args: &[&str]) -> (i32, String, RunReport) {
    let report = dir.join("report.json");
    let mut all: Vec<&str> = args.to_vec();
    let rp = report.to_str().unwrap();
    all.extend(["--report", rp]);
    let code = qpencil(&all);
    let text = std::fs::read_to_string(&report).unwrap();
    let parsed: RunReport = serde_json::from_str(&text).unwrap();
    (code, text, parsed)
}

fn check<'a>(r: &'a RunReport, name: &str) -> &'a qpencil_cli::run::CheckEntry {
    r.checks.iter().find(|c| c.report.condition == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sector_counterexample_passes_with_expected_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("ex35.json");
    let (code, _, r) = run_to(dir.path(), &["check", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(check(&r, "B_sector_pi_4").report.pass);
    let b2 = check(&r, "B2_right_half_plane");
    assert!(!b2.report.pass && b2.expected == Some(false) && b2.ok);
    assert_eq!(r.results["b2_e1_form"], serde_json::json!([-1.0, -8.0]));
    let herm = &r.results["b_hermitian_part"]["entries"];
    assert_eq!(herm[0][0][0], 4.0);
    assert_eq!(herm[1][1][0], 16.0);
    assert_eq!(herm[0][1], serde_json::json!([0.0, 0.0]));
}

#[test]
fn undeclared_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("ex35.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("expect");
    let input = dir.path().join("plain.json");
    std::fs::write(&input, v.to_string()).unwrap();
    let (code, _, r) = run_to(dir.path(), &["check", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn zero_data_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    let (code, _, _) = run_to(
        dir.path(),
        &["solve", "--input", fixture("zero.json").to_str().unwrap(), "--out", out.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 5 * 2);
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[3] == 0.0));
}

#[test]
fn scalar_problem_matches_closed_form() {
    // u'' - 2u' - 3u = 0, u(0) = 1, u(1) = 0: u = a e^{3x} + b e^{-x}
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    let (code, _, _) = run_to(
        dir.path(),
        &["solve", "--input", fixture("scalar.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--grid", "128"],
    );
    assert_eq!(code, 0);
    let (e3, em) = (3f64.exp(), (-1f64).exp());
    let b = e3 / (e3 - em);
    let a = 1.0 - b;
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 129);
    for r in rows {
        let exact = a * (3.0 * r[0]).exp() + b * (-r[0]).exp();
        assert!((r[2] - exact).abs() <= 1e-10 && r[3].abs() <= 1e-10, "{r:?}");
    }
}

#[test]
fn reports_are_byte_identical_and_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let ex35 = fixture("ex35.json");
    let op = fixture("ex35_b.json");
    let runs: [Vec<&str>; 4] = [
        vec!["check", "--input", ex35.to_str().unwrap(), "--seed", "7"],
        vec!["factorize", "--input", ex35.to_str().unwrap(), "--seed", "3", "--samples", "50"],
        vec!["numrange", "--input", op.to_str().unwrap(), "--samples", "90"],
        vec!["semigroup", "--input", op.to_str().unwrap()],
    ];
    for args in &runs {
        let (c1, t1, r1) = run_to(dir.path(), args);
        let (c2, t2, _) = run_to(dir.path(), args);
        assert_eq!(c1, 0, "{args:?}");
        assert_eq!(c1, c2);
        assert_eq!(t1, t2, "{args:?}");
        let again = serde_json::to_string_pretty(&r1).unwrap() + "\n";
        assert_eq!(again, t1);
    }
}

#[test]
fn range_csv_has_one_row_per_angle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let (code, _, _) = run_to(
        dir.path(),
        &["numrange", "--input", fixture("ex35_b.json").to_str().unwrap(), "--samples", "64", "--out", out.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    assert_eq!(csv_rows(&out).len(), 64);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"B": {"dim": 2, "entries": []}}"#).unwrap();
    assert_eq!(qpencil(&["check", "--input", bad.to_str().unwrap()]), 2);
    assert_eq!(qpencil(&["check"]), 2);
    assert_eq!(qpencil(&["solve", "--input", "/nonexistent.json"]), 2);
    assert_eq!(qpencil(&["check", "--convention", "sideways"]), 2);
}

#[test]
fn pde_example_reports_claims_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pde.csv");
    let (code, _, r) = run_to(
        dir.path(),
        &["pde-example", "--config", fixture("default.json").to_str().unwrap(), "--grid", "16", "--out", out.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    for k in 1..=6 {
        assert!(check(&r, &format!("claim_{k}")).report.pass);
    }
    assert_eq!(r.results["used"], "rotated_root");
    // 17 x intervals, 16 interior y nodes plus the two boundary rows
    assert_eq!(csv_rows(&out).len(), 18 * 18);
}
