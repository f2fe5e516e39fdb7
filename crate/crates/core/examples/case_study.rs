use std::time::Instant;

use bess_planner::config::RunConfig;
use bess_planner::planner::audit::audit;
use bess_planner::planner::report::summary_table;
use bess_planner::planner::solve_plan;
use bess_planner::study;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let overrides: Vec<String> = std::env::args().skip(1).collect();
    let cfg = RunConfig::default().with_overrides(&overrides)?;
    cfg.validate()?;
    let t0 = Instant::now();
    let set = study::prepare(&cfg)?;
    println!("scenarios composed in {:.2?}", t0.elapsed());
    let case = cfg.case_ids()?[0];
    let problem = study::plan_problem(&cfg, set, study::case_path(&cfg, case));
    let t1 = Instant::now();
    let sol = solve_plan(&problem)?;
    println!(
        "LP {} vars x {} rows ({} nnz), {} iterations, solved in {:.2?}",
        sol.lp.variables,
        sol.lp.rows,
        sol.lp.nonzeros,
        sol.lp.iterations,
        t1.elapsed()
    );
    print!("{}", summary_table(&sol));
    let rep = audit(&problem, &sol);
    println!("audit: {:?}", rep.violations(1e-6));
    Ok(())
}
