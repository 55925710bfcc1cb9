use std::path::Path;
use std::process::{Command, Output};

use hft_cli::CsvTable;

fn hft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hft"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn scan_emits_tracked_table() {
    let out = hft(&[
        "scan", "--model", "six-site", "--lmin", "0.2", "--lmax", "2", "--steps", "19", "--slopes",
    ]);
    assert!(out.status.success());
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert_eq!(table.rows.len(), 19);
    assert_eq!(table.header.len(), 13);
    assert_eq!(table.header[0], "lambda");
    assert_eq!(table.header[12], "slope5");
}

#[test]
fn oscillator_scan_starts_with_shell_energies() {
    let out = hft(&[
        "scan",
        "--model",
        "oscillator",
        "--omega",
        "1",
        "--nmax",
        "12",
        "--lmin",
        "0",
        "--lmax",
        "0.5",
        "--steps",
        "6",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    let row = &table.rows[0];
    for (k, e) in [1.0, 2.0, 2.0, 3.0].iter().enumerate() {
        assert!((row[k + 1] - e).abs() <= 1e-10);
    }
}

#[test]
fn scan_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = hft(&[
        "scan",
        "--steps",
        "5",
        "--sorted",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let table = CsvTable::parse(&text).unwrap();
    assert_eq!(table.to_csv().unwrap(), text);
}

#[test]
fn fermi_reports_cusp_and_writes_identical_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("two");
    let run = || {
        let out = hft(&[
            "fermi",
            "--np",
            "2",
            "--lmin",
            "0.2",
            "--lmax",
            "2",
            "--steps",
            "181",
            "--svg",
            stem.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let e0 = std::fs::read(dir.path().join("two_e0.svg")).unwrap();
        let de0 = std::fs::read(dir.path().join("two_de0.svg")).unwrap();
        (stdout(&out), e0, de0)
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);

    let table = CsvTable::parse(&first.0).unwrap();
    assert_eq!(table.header, ["lambda", "E0", "dE0"]);
    assert_eq!(
        table.comments,
        ["cusp,1.0000000000,-0.3333333333,-1.6666666667"]
    );
    let lambdas = table.column("lambda").unwrap();
    let e0 = table.column("E0").unwrap();
    let k = lambdas
        .iter()
        .position(|l| (l - 1.0).abs() < 1e-12)
        .unwrap();
    assert!((e0[k] + 3.0).abs() <= 1e-9);

    for svg in [&first.1, &first.2] {
        let text = std::str::from_utf8(svg).unwrap();
        let doc = roxmltree::Document::parse(text).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert_eq!(doc.root_element().attribute("viewBox"), Some("0 0 800 600"));
    }
    let de0 = std::str::from_utf8(&first.2).unwrap();
    assert_eq!(de0.matches("<circle").count(), 2);
    assert_eq!(de0.matches("<polyline").count(), 2);
}

#[test]
fn fermi_full_filling_has_zero_slope() {
    let out = hft(&["fermi", "--np", "6", "--steps", "37"]);
    assert!(out.status.success());
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert!(table
        .column("dE0")
        .unwrap()
        .iter()
        .all(|s| s.abs() <= 1e-12));
    assert!(table.comments.is_empty());
}

#[test]
fn check_passes_and_reports_cluster_slopes() {
    let out = hft(&["check", "--model", "six-site", "--lambda", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("cluster 1..2: slopes -1.000000000000 0.333333333333"),
        "{text}"
    );

    let out = hft(&[
        "check",
        "--model",
        "oscillator",
        "--omega",
        "1",
        "--nmax",
        "12",
        "--lambda",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("cluster 1..2: slopes -0.500000000000 0.500000000000"));
}

#[test]
fn check_fails_with_exit_one_on_large_residual() {
    // A coarse FD step ruins the finite-difference reference away from λ = 0.
    let out = hft(&[
        "check",
        "--model",
        "oscillator",
        "--nmax",
        "6",
        "--lambda",
        "0.3",
        "--fd-step",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--model", "nosuch", "--lambda", "1"][..],
        &["scan", "--lmin", "2", "--lmax", "1"],
        &["scan", "--steps", "1"],
        &["fermi", "--np", "7"],
        &[
            "scan",
            "--model",
            "oscillator",
            "--lmin",
            "-2",
            "--lmax",
            "0.5",
        ],
        &["classify", "--lambda", "0.5", "--tol-deg", "0"],
        &["scan", "--bogus"],
        &["check"],
        &["scan", "--steps", "5", "--out", "/nonexistent-dir/x.csv"],
    ] {
        let out = hft(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn classify_lists_labels() {
    let labels = |lambda: &str| -> Vec<String> {
        let out = hft(&["classify", "--model", "six-site", "--lambda", lambda]);
        assert!(out.status.success());
        stdout(&out)
            .lines()
            .map(|l| l.rsplit('\t').next().unwrap().to_string())
            .collect()
    };
    assert_eq!(labels("0.5"), ["B2", "A1", "A2", "B1", "B2", "A1"]);
    assert_eq!(labels("1.5"), ["B2", "A2", "A1", "B2", "B1", "A1"]);

    let out = hft(&["classify", "--model", "oscillator", "--lambda", "0.3"]);
    assert!(stdout(&out).lines().next().unwrap().ends_with("\tA1"));
}

#[test]
fn crossings_and_models() {
    for np in ["2", "4"] {
        let out = hft(&["crossings", "--np", np, "--lmin", "0.2", "--lmax", "2"]);
        let lines: Vec<f64> = stdout(&out).lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(lines.len(), 1);
        assert!((lines[0] - 1.0).abs() <= 1e-8);
    }
    let out = hft(&["crossings", "--np", "2", "--lmin", "0.2", "--lmax", "0.9"]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());

    let out = hft(&["models"]);
    let names: Vec<&str> = std::str::from_utf8(&out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(names, ["six-site", "oscillator"]);
    assert!(!Path::new("two_e0.svg").exists());
}
