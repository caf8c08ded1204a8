use std::process::{Command, Output};

use xorsat2_cli::{SimulateRow, SIMULATE_HEADER, THEORY_HEADER};

fn xorsat2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xorsat2")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SIM: &[&str] = &["simulate", "--n", "2000", "--lambda", "0", "--samples", "300", "--seed", "11"];

#[test]
fn simulate_is_deterministic_and_parseable() {
    let a = xorsat2(SIM);
    let b = xorsat2(SIM);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SIMULATE_HEADER));
    let row = SimulateRow::parse(lines.next().unwrap()).unwrap();
    assert!(lines.next().is_none());
    assert_eq!((row.n, row.samples, row.seed), (2000, 300, 11));
    assert!(row.mean > 0.0 && row.mean < 1.0);
    assert!(row.stderr > 0.0);
    assert!((row.ratio - row.mean / row.theory).abs() < 1e-12);

    let other = xorsat2(&["simulate", "--n", "2000", "--lambda", "0", "--samples", "300", "--seed", "12"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let mut args = SIM.to_vec();
    args.extend(["--out", path.to_str().unwrap()]);
    let o = xorsat2(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), xorsat2(SIM).stdout);
}

#[test]
fn indicator_reports_wilson_interval() {
    let o = xorsat2(&["simulate", "--n", "500", "--samples", "200", "--method", "indicator", "--grid-lambda", "-1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().filter(|l| l.starts_with("wilson95 ")).count(), 2);
}

#[test]
fn simulate_usage_errors() {
    assert_eq!(xorsat2(&["simulate", "--n", "100", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(xorsat2(&["simulate", "--n", "100", "--samples", "10", "--phat", "1.5"]).status.code(), Some(2));
    assert_eq!(xorsat2(&["simulate", "--n", "0", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(xorsat2(&["simulate", "--n", "100", "--samples", "10", "--model", "er"]).status.code(), Some(2));
}

#[test]
fn theory_grid_has_six_rows() {
    let o = xorsat2(&["theory", "--grid-lambda", "-2,0,2", "--grid-n", "10000,1000000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(THEORY_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!((r[5] / r[4] - 0.952_860_5).abs() < 1e-7, "{r:?}");
        assert!((r[2] / r[1] - 0.952_860_5).abs() < 1e-7);
    }
}

#[test]
fn theory_envelope_is_not_fatal() {
    let o = xorsat2(&["theory", "--n", "1000000", "--grid-lambda", "-40,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("envelope"));
}

#[test]
fn verify_suite_filter() {
    let o = xorsat2(&["verify", "--suite", "sequences"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let results: Vec<&str> = text.lines().filter(|l| l.starts_with("result ")).collect();
    assert!(!results.is_empty());
    assert!(results.iter().all(|l| l.contains("suite=sequences") && l.contains("status=pass")));
    assert!(text.ends_with(" 0 failed\n"));
}

#[test]
fn verify_catches_corrupted_tables() {
    let o = xorsat2(&["verify", "--suite", "sequences", "--inject-fault", "sequence-table"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=fail"));
    let o = xorsat2(&["verify", "--suite", "enumeration", "--inject-fault", "count-table"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_dumps_fraction_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.csv");
    let o = xorsat2(&["verify", "--suite", "sequences", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("kind,index,value\nepsilon,0,1/1\nepsilon,1,5/24\n"));
    assert!(text.contains("\nwright_c,1,5/24\n"));
    assert!(text.lines().any(|l| l.starts_with("f,100,")));
}

#[test]
fn enumerate_tables() {
    let o = xorsat2(&["enumerate", "--kind", "connected-even", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,m,count\n"));
    // the 4-cycle is the only even-only graph on 4 vertices with a cycle: 3 labellings
    assert!(text.contains("\n4,4,3\n"));
    assert!(text.contains("\n4,5,0\n"));
    assert_eq!(xorsat2(&["enumerate", "--kind", "connected-brute", "--n", "8"]).status.code(), Some(2));
}
