//! One day of four 6-hour slots with prices 10, 10, 50, 50 $/MWh, a 1 MW
//! load and a pre-installed 0.5 MWh battery. Buying the battery's energy in
//! the cheap half and using it in the expensive half saves 0.5 · 40 = 20 $.

use bess_planner::clustering::Level;
use bess_planner::market::{PriceFit, PriceModel};
use bess_planner::planner::audit::audit;
use bess_planner::planner::price_path::PricePath;
use bess_planner::planner::report::{dispatch_csv, summary_table};
use bess_planner::planner::{solve_plan, BatterySpec, PlanProblem};
use bess_planner::profiles::{DayType, DayTypeMap};
use bess_planner::scenarios::{Scenario, ScenarioDay, ScenarioSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let day = ScenarioDay::from_series(vec![1.0; 4], vec![0.0; 4], vec![0.0; 4], vec![10.0, 10.0, 50.0, 50.0])?;
    let scenario = Scenario { id: 1, day_type: DayType::SWD, solar_level: Level::High, wind_level: Level::High, probability: 1.0 };
    let flat = PriceModel::constant(DayTypeMap::from_fn(|_| PriceFit { alpha: 0.0, beta: 0.0, rmse: 0.0 }));
    let set = ScenarioSet::from_days(vec![scenario], flat, vec![vec![day]])?;

    let mut problem = PlanProblem::new(set, PricePath::constant("toy", 1e6, 1));
    problem.battery = BatterySpec { soc_min_frac: 0.0, soc_max_frac: 1.0, power_energy_ratio: 2.0, ..BatterySpec::default() };
    problem.discount_rate = 0.0;
    problem.annualization_days = 1.0;
    problem.gas_turbine_mw = 0.0;
    problem.existing_capacity_mwh = 0.5;

    let sol = solve_plan(&problem)?;
    print!("{}", summary_table(&sol));
    print!("{}", dispatch_csv(&sol, 1, 0));
    println!("audit violations: {:?}", audit(&problem, &sol).violations(1e-6));
    Ok(())
}
