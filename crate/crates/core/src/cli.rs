//! Batch command-line front end. Each command reads what the previous one
//! wrote under the output directory:
//!
//! ```text
//! ingest     → out/ingested/<series>.csv
//! cluster    → out/clusters/{solar,wind,micro_solar,demand,micro_demand}.json
//! fit-price  → out/price_model.json
//! plan       → out/scenarios.json, out/plan/<case>/{solution.json,summary.txt},
//!              out/plan/summary.csv
//! report     → out/report/<case>/{summary.txt,dispatch/*.csv}, out/report/installs.csv
//! ```
//!
//! Files are written to a temporary name and renamed into place, so a failed
//! command never leaves a half-written file or bundle behind.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::clustering::{ClusterFile, ClusterResult};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::market::PriceModel;
use crate::pipeline::{Clusters, InputSeries};
use crate::planner::price_path::{parse_cases, CaseId};
use crate::planner::report::{dispatch_csv, install_grid, summary_table};
use crate::planner::{solve_plan, PlanSolution};
use crate::profiles::{format_timeseries, load_timeseries, ColumnMap, DayTypeMap, Profile, ProfileKind};
use crate::study;

#[derive(Debug, Parser)]
#[command(name = "bess-plan", version, about = "Battery storage sizing and dispatch planning for a microgrid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize the input series to 15-minute resolution.
    Ingest,
    /// Representative high/low renewable days and per-day-type demand.
    Cluster,
    /// Fit the per-day-type price model.
    FitPrice,
    /// Solve one plan per battery price case.
    Plan,
    /// Summary tables and dispatch CSVs from solved plans.
    Report,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Price cases, e.g. `a-1..a-10,b-1..b-10`.
    #[arg(long, global = true, value_name = "LIST")]
    pub cases: Option<String>,
    /// Worker threads for independent price cases.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Config override, repeatable: `--set battery.life_years=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut cfg = base.with_overrides(&self.set)?;
        if let Some(c) = &self.cases {
            cfg.cases = c.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns what it prints on success.
pub fn execute(cli: &Cli) -> Result<String> {
    let cfg = cli.common.resolve()?;
    let jobs = cli.common.jobs.unwrap_or(0);
    match cli.command {
        Command::Ingest => cmd_ingest(&cfg),
        Command::Cluster => cmd_cluster(&cfg),
        Command::FitPrice => cmd_fit_price(&cfg),
        Command::Plan => cmd_plan(&cfg, jobs),
        Command::Report => cmd_report(&cfg, cli.common.cases.is_some()),
    }
}

pub fn ingested_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("ingested")
}

pub fn clusters_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("clusters")
}

pub fn plan_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("plan")
}

pub fn report_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.join("report")
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    create_dir(dir)?;
    let mut tmp = tempfile::Builder::new().prefix(".tmp-").tempfile_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Model(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn read_json<T: DeserializeOwned>(path: &Path, hint: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Schema {
        source_name: path.display().to_string(),
        message: format!("{e}; run `{hint}` first"),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema { source_name: path.display().to_string(), message: e.to_string() })
}

/// Fills a fresh temporary directory and renames it to `dir`, replacing any
/// previous contents.
fn publish_dir(dir: &Path, fill: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let parent = dir.parent().unwrap_or(Path::new("."));
    create_dir(parent)?;
    let tmp = tempfile::Builder::new().prefix(".tmp-").tempdir_in(parent).map_err(|e| Error::io(parent, e))?;
    fill(tmp.path())?;
    if dir.exists() {
        std::fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let kept = tmp.keep();
    std::fs::rename(&kept, dir).map_err(|e| Error::io(dir, e))
}

fn series_kind(name: &str) -> ProfileKind {
    match name {
        "solar" | "micro_solar" => ProfileKind::Solar,
        "wind" => ProfileKind::Wind,
        "price" => ProfileKind::Price,
        _ => ProfileKind::Demand,
    }
}

pub fn cmd_ingest(cfg: &RunConfig) -> Result<String> {
    let series = study::load_inputs(cfg)?;
    let dir = ingested_dir(cfg);
    let mut texts = Vec::with_capacity(InputSeries::NAMES.len());
    for p in series.all() {
        texts.push(format_timeseries(p)?);
    }
    let mut summary = format!("{:<14} {:>8} {:>12} {:>12} {:>12}\n", "series", "samples", "min", "max", "mean");
    for ((name, p), text) in InputSeries::NAMES.iter().zip(series.all()).zip(&texts) {
        write_atomic(&dir.join(format!("{name}.csv")), text.as_bytes())?;
        let (lo, hi) = p.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        summary.push_str(&format!("{:<14} {:>8} {:>12.3} {:>12.3} {:>12.3}\n", name, p.len(), lo, hi, p.mean()));
    }
    summary.push_str(&format!("wrote {}\n", dir.display()));
    Ok(summary)
}

/// Reads the series `ingest` wrote.
pub fn read_ingested(cfg: &RunConfig) -> Result<InputSeries> {
    let dir = ingested_dir(cfg);
    let cols = ColumnMap::default();
    let load = |name: &str| -> Result<Profile> {
        let path = dir.join(format!("{name}.csv"));
        if !path.exists() {
            return Err(Error::Schema { source_name: path.display().to_string(), message: "missing; run `ingest` first".into() });
        }
        load_timeseries(&path, &cols, series_kind(name))
    };
    let series = InputSeries {
        demand: load("demand")?,
        solar: load("solar")?,
        wind: load("wind")?,
        price: load("price")?,
        micro_demand: load("micro_demand")?,
        micro_solar: load("micro_solar")?,
    };
    series.validate()?;
    Ok(series)
}

pub fn cmd_cluster(cfg: &RunConfig) -> Result<String> {
    let series = read_ingested(cfg)?;
    let c = study::clusters(cfg, &series)?;
    let dir = clusters_dir(cfg);
    let mut summary = String::new();
    for (name, r) in [("solar", &c.solar), ("wind", &c.wind), ("micro_solar", &c.micro_solar)] {
        write_json(&dir.join(format!("{name}.json")), &r.to_file())?;
        let highs = r.assignments.iter().filter(|l| matches!(l, crate::clustering::Level::High)).count();
        summary.push_str(&format!(
            "{name}: {highs} high / {} low days, centroid energy {:.2} / {:.2} MWh\n",
            r.assignments.len() - highs,
            r.high.energy(),
            r.low.energy()
        ));
    }
    for (name, m) in [("demand", &c.demand), ("micro_demand", &c.micro_demand)] {
        write_json(&dir.join(format!("{name}.json")), &m.map(|_, p| p.values.clone()))?;
    }
    summary.push_str(&format!("wrote {}\n", dir.display()));
    Ok(summary)
}

/// Reads the representative days `cluster` wrote.
pub fn read_clusters(cfg: &RunConfig) -> Result<Clusters> {
    let dir = clusters_dir(cfg);
    let renewable = |name: &str, kind| -> Result<ClusterResult> {
        let f: ClusterFile = read_json(&dir.join(format!("{name}.json")), "cluster")?;
        let (high, low) = f.centroids(kind)?;
        Ok(ClusterResult { high, low, assignments: f.assignments, inertia: f64::NAN, history: Vec::new() })
    };
    let typed = |name: &str| -> Result<DayTypeMap<Profile>> {
        let m: DayTypeMap<Vec<f64>> = read_json(&dir.join(format!("{name}.json")), "cluster")?;
        m.try_map(|_, v| Profile::daily(ProfileKind::Demand, v.clone()))
    };
    Ok(Clusters {
        solar: renewable("solar", ProfileKind::Solar)?,
        wind: renewable("wind", ProfileKind::Wind)?,
        micro_solar: renewable("micro_solar", ProfileKind::Solar)?,
        demand: typed("demand")?,
        micro_demand: typed("micro_demand")?,
    })
}

pub fn cmd_fit_price(cfg: &RunConfig) -> Result<String> {
    let series = read_ingested(cfg)?;
    let model = study::price_model(cfg, &series)?;
    let path = cfg.out_dir.join("price_model.json");
    write_json(&path, &model)?;
    let mut summary = format!("{:<6} {:>12} {:>10} {:>8}\n", "day", "alpha", "beta", "rmse");
    for (d, f) in model.base.iter() {
        summary.push_str(&format!("{:<6} {:>12.6} {:>10.3} {:>8.3}\n", d.as_str(), f.alpha, f.beta, f.rmse));
    }
    summary.push_str(&format!("wrote {}\n", path.display()));
    Ok(summary)
}

pub fn read_price_model(cfg: &RunConfig) -> Result<PriceModel> {
    let model: PriceModel = read_json(&cfg.out_dir.join("price_model.json"), "fit-price")?;
    model.validate()?;
    Ok(model)
}

fn solve_case(cfg: &RunConfig, set: &crate::scenarios::ScenarioSet, case: CaseId) -> Result<PlanSolution> {
    let problem = study::plan_problem(cfg, set.clone(), study::case_path(cfg, case));
    solve_plan(&problem)
}

pub fn cmd_plan(cfg: &RunConfig, jobs: usize) -> Result<String> {
    let clusters = read_clusters(cfg)?;
    let model = read_price_model(cfg)?;
    let set = study::scenario_set(cfg, &clusters, &model)?;
    let cases = cfg.case_ids()?;
    write_json(&cfg.out_dir.join("scenarios.json"), &set)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<Result<PlanSolution>> = pool.install(|| cases.par_iter().map(|&c| solve_case(cfg, &set, c)).collect());

    let dir = plan_dir(cfg);
    let mut solved = Vec::new();
    let mut first_err = None;
    for (case, res) in cases.iter().zip(results) {
        match res {
            Ok(sol) => {
                publish_dir(&dir.join(case.to_string()), |tmp| {
                    write_json(&tmp.join("solution.json"), &sol)?;
                    write_atomic(&tmp.join("summary.txt"), summary_table(&sol).as_bytes())
                })?;
                solved.push(sol);
            }
            Err(e) => {
                let e = match e {
                    Error::Optimization { status, diagnosis } => {
                        Error::Optimization { status, diagnosis: format!("case {case}: {diagnosis}") }
                    }
                    other => other,
                };
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    write_atomic(&dir.join("summary.csv"), install_grid(&solved).as_bytes())?;
    let mut out = String::from("case,installed_mwh,first_install_year,discounted_cost,savings\n");
    for s in &solved {
        out.push_str(&format!(
            "{},{:.3},{},{:.2},{:.2}\n",
            s.label,
            s.total_installed(),
            s.first_install_year(1e-6).map_or("-".to_string(), |y| y.to_string()),
            s.costs.discounted_total,
            s.savings
        ));
    }
    out.push_str(&format!("wrote {} bundles to {}\n", solved.len(), dir.display()));
    Ok(out)
}

pub fn read_bundle(cfg: &RunConfig, case: &str) -> Result<PlanSolution> {
    let path = plan_dir(cfg).join(case).join("solution.json");
    if !path.exists() {
        return Err(Error::Schema { source_name: path.display().to_string(), message: "no plan bundle; run `plan` first".into() });
    }
    read_json(&path, "plan")
}

/// Case labels with a bundle under `out/plan`, in case order.
fn bundled_cases(cfg: &RunConfig) -> Result<Vec<String>> {
    let dir = plan_dir(cfg);
    let entries = std::fs::read_dir(&dir).map_err(|e| Error::Schema {
        source_name: dir.display().to_string(),
        message: format!("{e}; run `plan` first"),
    })?;
    let mut cases: Vec<CaseId> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(&dir, e))?;
        if let Some(id) = entry.file_name().to_str().and_then(|n| n.parse::<CaseId>().ok()) {
            if entry.path().join("solution.json").exists() {
                cases.push(id);
            }
        }
    }
    cases.sort();
    Ok(cases.iter().map(|c| c.to_string()).collect())
}

/// `explicit_cases`: report exactly `cfg.cases` rather than every bundle.
pub fn cmd_report(cfg: &RunConfig, explicit_cases: bool) -> Result<String> {
    let cases: Vec<String> = if explicit_cases {
        parse_cases(&cfg.cases)?.iter().map(|c| c.to_string()).collect()
    } else {
        bundled_cases(cfg)?
    };
    if cases.is_empty() {
        return Err(Error::Schema { source_name: plan_dir(cfg).display().to_string(), message: "no plan bundles found".into() });
    }
    let solutions = cases.iter().map(|c| read_bundle(cfg, c)).collect::<Result<Vec<_>>>()?;
    let dir = report_dir(cfg);
    let mut out = String::new();
    for sol in &solutions {
        let table = summary_table(sol);
        publish_dir(&dir.join(&sol.label), |tmp| {
            write_atomic(&tmp.join("summary.txt"), table.as_bytes())?;
            let scen_labels = scenario_labels(cfg, sol);
            for y in 1..=sol.dispatch.len() {
                for (k, label) in scen_labels.iter().enumerate().take(sol.dispatch[y - 1].len()) {
                    let name = format!("year{y:02}_{label}.csv");
                    write_atomic(&tmp.join("dispatch").join(name), dispatch_csv(sol, y, k).as_bytes())?;
                }
            }
            Ok(())
        })?;
        out.push_str(&table);
        out.push('\n');
    }
    write_atomic(&dir.join("installs.csv"), install_grid(&solutions).as_bytes())?;
    out.push_str(&format!("wrote {}\n", dir.display()));
    Ok(out)
}

/// Scenario labels from `out/scenarios.json` when present, otherwise
/// positional names.
fn scenario_labels(cfg: &RunConfig, sol: &PlanSolution) -> Vec<String> {
    let n = sol.dispatch.first().map_or(0, |d| d.len());
    read_json::<crate::scenarios::ScenarioSet>(&cfg.out_dir.join("scenarios.json"), "plan")
        .ok()
        .filter(|s| s.scenarios.len() == n)
        .map(|s| s.scenarios.iter().map(|sc| format!("s{:02}_{}", sc.id, sc.label())).collect())
        .unwrap_or_else(|| (1..=n).map(|k| format!("s{k:02}")).collect())
}
