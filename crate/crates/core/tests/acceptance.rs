//! Exit-gate checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bess_planner::cli::{execute, Cli};
use bess_planner::config::RunConfig;
use bess_planner::growth::grow_solar;
use bess_planner::planner::audit::audit;
use bess_planner::planner::price_path::PricePath;
use bess_planner::planner::{solve_plan, FeedbackMode, PlanProblem, PlanSolution};
use bess_planner::profiles::{Profile, ProfileKind};
use bess_planner::scenarios::{build_scenarios, day_probabilities, LevelProbabilities};
use bess_planner::study;
use clap::Parser;
use common::*;
use lp_oracle::{random_instance, solve_by_enumeration, DenseLp, OracleOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_simplex::{solve, Bounds, LpInstance, SolveOptions, Status};

const TABLE_ONE: [f64; 16] = [3.2, 7.4, 4.7, 11.0, 1.2, 2.8, 1.8, 4.1, 5.4, 12.7, 8.1, 19.0, 2.2, 5.2, 3.4, 7.8];
const TABLE_TOL_PP: f64 = 0.05;
const SUM_TOL: f64 = 1e-12;
const LP_INSTANCES: u64 = 400;
const LP_ABS_TOL: f64 = 1e-6;
const LP_REL_TOL: f64 = 1e-8;
const AUDIT_TOL: f64 = 1e-6;
const SAVINGS_TOL: f64 = 1e-6;
const MONOTONE_TOL: f64 = 1e-6;
const MONOTONE_BASE_SCALE: f64 = 0.25;
const FEEDBACK_EXACT_TOL: f64 = 1e-9;
const FEEDBACK_QP_TOL: f64 = 1e-4;
const GROWTH_TOL: f64 = 1e-5;

type Outcome = Result<String, String>;

/// Solved plans kept for the audit criterion.
struct Solved(Vec<(String, PlanProblem, PlanSolution)>);

impl Solved {
    fn solve(&mut self, name: &str, p: PlanProblem) -> Result<PlanSolution, String> {
        let sol = solve_plan(&p).map_err(|e| format!("{name}: {e}"))?;
        self.0.push((name.to_string(), p, sol.clone()));
        Ok(sol)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Ok(format!("{detail} in {:.2?}", elapsed))
    } else {
        Err(format!("{detail} but took {:.2?} (limit {:.0?})", elapsed, limit))
    }
}

fn table_one() -> Outcome {
    let t = Instant::now();
    let counts = RunConfig::default().day_counts;
    let levels = LevelProbabilities { high_solar: 0.30, high_wind: 0.40 };
    let s = build_scenarios(&levels, &day_probabilities(&counts).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (sc, want) in s.iter().zip(TABLE_ONE) {
        worst = worst.max((100.0 * sc.probability - want).abs());
    }
    let sum: f64 = s.iter().map(|x| x.probability).sum();
    let elapsed = t.elapsed();
    if s.len() != 16 || worst > TABLE_TOL_PP || (sum - 1.0).abs() > SUM_TOL {
        return Err(format!("{} scenarios, worst deviation {worst:.4} pp, sum − 1 = {:e}", s.len(), sum - 1.0));
    }
    within(elapsed, Duration::from_secs(1), format!("worst deviation {worst:.4} pp, sum − 1 = {:e}", sum - 1.0))
}

fn to_instance(d: &DenseLp) -> LpInstance {
    let mut triplets = Vec::new();
    for (i, row) in d.a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            triplets.push((i, j, v));
        }
    }
    let objective: Vec<(usize, f64)> = d.c.iter().copied().enumerate().collect();
    let bounds = d.lower.iter().zip(&d.upper).map(|(&l, &u)| Bounds::new(l, u)).collect();
    LpInstance::new(d.c.len(), d.b.len(), &objective, &triplets, d.b.clone(), bounds).unwrap()
}

fn lp_oracle() -> Outcome {
    let t = Instant::now();
    let options = SolveOptions::default();
    let (mut optimal, mut infeasible) = (0, 0);
    for seed in 0..LP_INSTANCES {
        let dense = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 6, 6);
        let res = solve(&to_instance(&dense), &options).map_err(|e| format!("seed {seed}: {e}"))?;
        match solve_by_enumeration(&dense) {
            OracleOutcome::Infeasible if res.status == Status::Infeasible => infeasible += 1,
            OracleOutcome::Optimal { objective, .. } if res.status == Status::Optimal => {
                let diff = (res.objective_value - objective).abs();
                if diff > LP_ABS_TOL && diff > LP_REL_TOL * objective.abs() {
                    return Err(format!("seed {seed}: solver {} vs oracle {objective}", res.objective_value));
                }
                optimal += 1;
            }
            other => return Err(format!("seed {seed}: solver {:?}, oracle {other:?}", res.status)),
        }
    }
    within(t.elapsed(), Duration::from_secs(30), format!("{LP_INSTANCES} instances ({optimal} optimal, {infeasible} infeasible)"))
}

fn toy_arbitrage_savings(solved: &mut Solved) -> Outcome {
    let sol = solved.solve("toy", toy_arbitrage())?;
    let oracle = toy_grid_oracle(0.0, 1.0, &TOY_PRICES, 6.0) - toy_grid_oracle(0.5, 1.0, &TOY_PRICES, 6.0);
    if (sol.savings - 20.0).abs() > SAVINGS_TOL || (oracle - 20.0).abs() > SAVINGS_TOL {
        return Err(format!("savings {} , oracle {oracle}", sol.savings));
    }
    Ok(format!("savings {:.9}, grid oracle {oracle:.9}", sol.savings))
}

fn monotonicity(solved: &mut Solved) -> Outcome {
    let t = Instant::now();
    let cfg = desk_config(5);
    let set = study::prepare(&cfg).map_err(|e| e.to_string())?;
    if set.scenarios.len() != 4 || set.slots() != 24 {
        return Err(format!("desk problem has {} scenarios and {} slots", set.scenarios.len(), set.slots()));
    }
    let base = study::case_path(&cfg, cfg.case_ids().unwrap()[0]).scaled(MONOTONE_BASE_SCALE);
    let mut rows = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        let p = study::plan_problem(&cfg, set.clone(), base.scaled(k));
        let sol = solved.solve(&format!("monotonicity x{k}"), p)?;
        rows.push((k, sol.total_installed(), sol.costs.discounted_total));
    }
    let detail = rows.iter().map(|(k, u, c)| format!("x{k}: {u:.3} MWh, {c:.2}")).collect::<Vec<_>>().join("; ");
    for w in rows.windows(2) {
        if w[1].1 > w[0].1 + MONOTONE_TOL || w[1].2 < w[0].2 - MONOTONE_TOL * w[0].2.abs().max(1.0) {
            return Err(detail);
        }
    }
    within(t.elapsed(), Duration::from_secs(60), detail)
}

fn threshold(solved: &mut Solved) -> Outcome {
    let days = 365.0;
    // Value of one MWh of storage for one year, from the exhaustive day search.
    let per_mwh_day = (toy_grid_oracle(0.0, 1.0, &TOY_PRICES, 6.0) - toy_grid_oracle(0.5, 1.0, &TOY_PRICES, 6.0)) / 0.5;
    let breakeven = per_mwh_day * days / 1000.0;
    let years = 15;
    let path: Vec<f64> = (0..years).map(|k| 20.0 - 10.0 * k as f64 / 14.0).collect();
    let mut p = single_day_problem(vec![1.0; 4], vec![0.0; 4], TOY_PRICES.to_vec(), years, 1.0);
    p.price_path = PricePath { label: "declining".into(), cost_per_kwh: path.clone() };
    p.battery.life_years = 1;
    p.annualization_days = days;
    p.discount_rate = 0.05;
    let sol = solved.solve("threshold", p)?;
    let crossing = path.iter().position(|&c| c < breakeven).map(|k| k + 1).ok_or("path never crosses breakeven")?;
    let first = sol.first_install_year(1e-6).ok_or("no install")?;
    let detail = format!("breakeven ${breakeven:.2}/kWh crossed in year {crossing}, first install year {first}");
    if first.abs_diff(crossing) <= 1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn feedback(solved: &mut Solved) -> Outcome {
    let fixed = FeedbackMode::FixedPoint { max_iters: 100, tol: 1e-10, damping: 1.0 };
    let flat = feedback_toy(0.0, 30.0, [0.0, 1.0]);
    let exo = solved.solve("feedback alpha=0 exogenous", flat.clone())?;
    let mut fb = flat;
    fb.feedback = fixed;
    let fp = solved.solve("feedback alpha=0 fixed point", fb)?;
    let diff = (fp.costs.discounted_total - exo.costs.discounted_total).abs();

    let (alpha, beta, net) = (10.0, 5.0, [0.0, 1.0]);
    let mut toy = feedback_toy(alpha, beta, net);
    toy.feedback = fixed;
    let sol = solved.solve("feedback QP toy", toy)?;
    // Both prices equalize at α·(mean net + load) + β when storage is ample.
    let lambda = alpha * ((net[0] + net[1]) / 2.0 + 1.0) + beta;
    let err = sol.dispatch[0][0].price.iter().map(|l| (l - lambda).abs()).fold(0.0, f64::max);
    let detail = format!("alpha=0 objective diff {diff:e}; QP toy max price error {err:e}");
    if diff <= FEEDBACK_EXACT_TOL && err <= FEEDBACK_QP_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn growth() -> Outcome {
    let mut oracle: f64 = 1.0;
    for _ in 0..15 {
        oracle *= 1.07;
    }
    let mut p = Profile::daily(ProfileKind::Solar, (0..96).map(|k| 1.0 + k as f64).collect()).map_err(|e| e.to_string())?;
    let original = p.clone();
    for _ in 0..15 {
        p = grow_solar(&p, 7.0);
    }
    let worst = p.values.iter().zip(&original.values).map(|(g, v)| (g / v - 2.759031).abs()).fold(0.0, f64::max);
    let detail = format!("factor {:.7}, oracle {oracle:.7}, worst deviation {worst:e}", p.values[0]);
    if worst <= GROWTH_TOL && (oracle - 2.759031).abs() <= GROWTH_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = dir.join("out");
    let mut argv = vec!["bess-plan".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--out".into(), out.display().to_string()]);
    for kv in ["horizon_years=3", "step_minutes=60", "scenario_ids=[4,8,12,16]", "price_scale=0.25"] {
        argv.extend(["--set".into(), kv.into()]);
    }
    let parsed = Cli::try_parse_from(&argv).map_err(|e| e.to_string())?;
    execute(&parsed).map(|_| ()).map_err(|e| format!("{}: {e}", args[0]))
}

fn collect_files(root: &Path, rel: &Path, out: &mut Vec<(String, Vec<u8>)>) -> std::io::Result<()> {
    let mut entries: Vec<_> = fs::read_dir(root.join(rel))?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let r = rel.join(e.file_name());
        if e.file_type()?.is_dir() {
            collect_files(root, &r, out)?;
        } else {
            out.push((r.display().to_string(), fs::read(e.path())?));
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let mut bundles = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for cmd in ["ingest", "cluster", "fit-price"] {
            cli(dir.path(), &[cmd])?;
        }
        cli(dir.path(), &["plan", "--cases", "a-1,a-5,b-1,b-5"])?;
        let mut files = Vec::new();
        collect_files(&dir.path().join("out"), Path::new("plan"), &mut files).map_err(|e| e.to_string())?;
        bundles.push(files);
    }
    let n = bundles[0].len();
    let bytes: usize = bundles[0].iter().map(|(_, b)| b.len()).sum();
    if bundles[0] == bundles[1] && n > 0 {
        Ok(format!("{n} files, {bytes} bytes identical across runs"))
    } else {
        Err(format!("bundles differ ({n} vs {} files)", bundles[1].len()))
    }
}

fn full_case(solved: &mut Solved) -> Outcome {
    let t = Instant::now();
    let cfg = RunConfig { cases: "a-1".into(), ..RunConfig::default() };
    let set = study::prepare(&cfg).map_err(|e| e.to_string())?;
    let (years, scen, slots) = (set.horizon(), set.scenarios.len(), set.slots());
    if (years, scen, slots) != (15, 16, 96) {
        return Err(format!("full case is {years}×{scen}×{slots}"));
    }
    let p = study::plan_problem(&cfg, set, study::case_path(&cfg, cfg.case_ids().unwrap()[0]));
    let sol = solved.solve("full case a-1", p)?;
    within(
        t.elapsed(),
        Duration::from_secs(600),
        format!("{years} years × {scen} scenarios × {slots} slots, {} LP vars, {:.3} MWh installed", sol.lp.variables, sol.total_installed()),
    )
}

fn audit_all(solved: &Solved) -> Outcome {
    let mut failures = Vec::new();
    for (name, p, sol) in &solved.0 {
        let v = audit(p, sol).violations(AUDIT_TOL);
        if !v.is_empty() {
            failures.push(format!("{name}: {}", v.join(", ")));
        }
    }
    if failures.is_empty() {
        Ok(format!("{} solved plans clean at {AUDIT_TOL:e}", solved.0.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let mut solved = Solved(Vec::new());
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "scenario probability table", table_one()),
        (2, "LP solver vs basis enumeration", lp_oracle()),
        (4, "toy arbitrage savings", toy_arbitrage_savings(&mut solved)),
        (5, "battery price monotonicity", monotonicity(&mut solved)),
        (6, "install threshold year", threshold(&mut solved)),
        (7, "price feedback degeneracy", feedback(&mut solved)),
        (8, "growth compounding", growth()),
        (9, "end-to-end determinism", determinism()),
        (10, "full synthetic case performance", full_case(&mut solved)),
    ];
    results.push((3, "dispatch feasibility audit", audit_all(&solved)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
