//! Desk-scale study on the synthetic year: 3 plan years, one low-solar
//! low-wind scenario per day type, hourly slots. Runs the a- and b-category
//! price paths at a quarter of their nominal level (so that some cases
//! invest) and prints the year × case install grid.
//!
//! Extra `key=value` arguments override the configuration, for example
//! `cargo run --release --example desk_study -- horizon_years=5`.

use std::time::Instant;

use bess_planner::config::RunConfig;
use bess_planner::planner::audit::audit;
use bess_planner::planner::report::install_grid;
use bess_planner::planner::{solve_plan, PlanSolution};
use bess_planner::study;
use rayon::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut overrides: Vec<String> = [
        "horizon_years=3",
        "step_minutes=60",
        "scenario_ids=[4,8,12,16]",
        "cases=a-1,a-5,a-10,b-1,b-5,b-10",
        "price_scale=0.25",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    overrides.extend(std::env::args().skip(1));
    let cfg = RunConfig::default().with_overrides(&overrides)?;
    cfg.validate()?;

    let t0 = Instant::now();
    let set = study::prepare(&cfg)?;
    let cases = cfg.case_ids()?;
    let solutions: Vec<PlanSolution> = cases
        .par_iter()
        .map(|&c| {
            let problem = study::plan_problem(&cfg, set.clone(), study::case_path(&cfg, c));
            let sol = solve_plan(&problem)?;
            let violations = audit(&problem, &sol).violations(1e-6);
            assert!(violations.is_empty(), "{c}: {violations:?}");
            Ok(sol)
        })
        .collect::<bess_planner::Result<_>>()?;
    println!("{} cases in {:.2?}\n", cases.len(), t0.elapsed());
    print!("{}", install_grid(&solutions));
    println!();
    println!("{:<6} {:>12} {:>14} {:>12}", "case", "installed", "cost", "savings");
    for s in &solutions {
        println!("{:<6} {:>12.3} {:>14.2} {:>12.2}", s.label, s.total_installed(), s.costs.discounted_total, s.savings);
    }
    Ok(())
}
