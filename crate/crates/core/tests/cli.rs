mod common;

use std::fs;
use std::path::{Path, PathBuf};

use bess_planner::cli::run;
use bess_planner::planner::report::DISPATCH_HEADER;
use bess_planner::planner::solve_plan;

fn bess(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.join("out");
    let mut argv = vec!["bess-plan".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend([
        "--out".into(),
        out.display().to_string(),
        "--set".into(),
        "horizon_years=2".into(),
        "--set".into(),
        "step_minutes=60".into(),
        "--set".into(),
        "scenario_ids=[4,12]".into(),
    ]);
    run(argv)
}

fn pipeline(dir: &Path, cases: &str) {
    for cmd in ["ingest", "cluster", "fit-price"] {
        assert_eq!(bess(dir, &[cmd]), 0, "{cmd}");
    }
    assert_eq!(bess(dir, &["plan", "--cases", cases]), 0);
}

fn read(p: PathBuf) -> Vec<u8> {
    fs::read(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn full_pipeline_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path(), "a-1,b-3");
    pipeline(b.path(), "a-1,b-3");
    for case in ["a-1", "b-3"] {
        let rel = format!("out/plan/{case}/solution.json");
        assert_eq!(read(a.path().join(&rel)), read(b.path().join(&rel)), "{case}");
    }
    assert_eq!(read(a.path().join("out/plan/summary.csv")), read(b.path().join("out/plan/summary.csv")));

    assert_eq!(bess(a.path(), &["report"]), 0);
    let report = a.path().join("out/report");
    let dispatch: Vec<PathBuf> = fs::read_dir(report.join("a-1/dispatch")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dispatch.len(), 2 * 2);
    for p in &dispatch {
        let text = String::from_utf8(read(p.clone())).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(DISPATCH_HEADER));
        assert_eq!(lines.count(), 24);
    }
    let installs = String::from_utf8(read(report.join("installs.csv"))).unwrap();
    assert_eq!(installs.lines().next(), Some("year,a-1,b-3"));
    assert_eq!(installs.lines().count(), 3);
}

#[test]
fn report_reads_whatever_bundle_is_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut sol = solve_plan(&common::toy_arbitrage()).unwrap();
    sol.label = "a-1".into();
    let bundle = dir.path().join("out/plan/a-1");
    fs::create_dir_all(&bundle).unwrap();
    fs::write(bundle.join("solution.json"), serde_json::to_vec(&sol).unwrap()).unwrap();
    assert_eq!(bess(dir.path(), &["report"]), 0);
    let summary = String::from_utf8(read(dir.path().join("out/report/a-1/summary.txt"))).unwrap();
    assert!(summary.contains("savings: 20.00"), "{summary}");
}

#[test]
fn nominal_prices_install_nothing_and_save_nothing() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), "a-1");
    assert_eq!(bess(dir.path(), &["report"]), 0);
    let summary = String::from_utf8(read(dir.path().join("out/report/a-1/summary.txt"))).unwrap();
    assert!(summary.contains("total installed: 0.000 MWh"), "{summary}");
    assert!(summary.contains("savings: 0.00"), "{summary}");
}

#[test]
fn every_case_gets_a_bundle() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), "a-1..a-10,b-1..b-10");
    let n = fs::read_dir(dir.path().join("out/plan"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().join("solution.json").exists())
        .count();
    assert_eq!(n, 20);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bess(dir.path(), &["plan"]), 2, "no stage outputs yet");
    assert_eq!(bess(dir.path(), &["report"]), 2, "no bundles yet");
    assert_eq!(bess(dir.path(), &["plan", "--bogus"]), 2);
    assert_eq!(bess(dir.path(), &["ingest", "--set", "price_scale=-1"]), 2);
    assert_eq!(bess(dir.path(), &["ingest", "--config", "/nonexistent/cfg.json"]), 2);
    for cmd in ["ingest", "cluster", "fit-price"] {
        assert_eq!(bess(dir.path(), &[cmd]), 0);
    }
    assert_eq!(bess(dir.path(), &["plan", "--cases", "a-1", "--set", "congestion_limit_mw=0"]), 4);
    assert_eq!(bess(dir.path(), &["plan", "--cases", "c-1"]), 2);
}
