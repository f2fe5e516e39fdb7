//! Prices that respond to the microgrid's own purchases. Two 12-hour slots
//! with market net demand 0 and 1 (in units scaled so that α = 10 makes the
//! feedback strong), a 1 MW load and a 10 MWh battery already in place.
//!
//! At the fixed point the battery equalizes the two prices, which then sit
//! at α·((n₁ + n₂)/2 + L) + β. Exogenous prices would instead fill the
//! battery in the cheap slot as far as it goes.

use bess_planner::clustering::Level;
use bess_planner::market::{PriceFit, PriceModel};
use bess_planner::planner::price_path::PricePath;
use bess_planner::planner::{solve_plan, BatterySpec, FeedbackMode, PlanProblem};
use bess_planner::profiles::{DayType, DayTypeMap};
use bess_planner::scenarios::{Scenario, ScenarioDay, ScenarioSet};

const ALPHA: f64 = 10.0;
const BETA: f64 = 5.0;

fn problem(feedback: FeedbackMode) -> Result<PlanProblem, Box<dyn std::error::Error>> {
    let net = vec![0.0, 1.0];
    let price: Vec<f64> = net.iter().map(|n| ALPHA * n + BETA).collect();
    let day = ScenarioDay::from_series(vec![1.0; 2], vec![0.0; 2], net, price)?;
    let scenario = Scenario { id: 1, day_type: DayType::SWD, solar_level: Level::High, wind_level: Level::High, probability: 1.0 };
    let model = PriceModel::constant(DayTypeMap::from_fn(|_| PriceFit { alpha: ALPHA, beta: BETA, rmse: 0.0 }));
    let set = ScenarioSet::from_days(vec![scenario], model, vec![vec![day]])?;
    let mut p = PlanProblem::new(set, PricePath::constant("feedback-toy", 1e6, 1));
    p.battery = BatterySpec { soc_min_frac: 0.0, soc_max_frac: 1.0, ..BatterySpec::default() };
    p.discount_rate = 0.0;
    p.annualization_days = 1.0;
    p.gas_turbine_mw = 0.0;
    p.existing_capacity_mwh = 10.0;
    p.feedback = feedback;
    Ok(p)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exo = solve_plan(&problem(FeedbackMode::Off)?)?;
    let d = &exo.dispatch[0][0];
    println!("exogenous: purchases {:.3?} at prices {:.3?}", d.purchase, d.price);

    let fb = solve_plan(&problem(FeedbackMode::FixedPoint { max_iters: 200, tol: 1e-9, damping: 1.0 })?)?;
    let d = &fb.dispatch[0][0];
    let report = fb.feedback.as_ref().expect("feedback report");
    println!("fixed point: purchases {:.6?} at prices {:.6?}", d.purchase, d.price);
    println!("converged {} after {} iterations; last price change {:.2e}", report.converged, report.iterations, report.max_price_change.last().copied().unwrap_or(0.0));
    println!("closed form price: {:.6}", ALPHA * ((0.0 + 1.0) / 2.0 + 1.0) + BETA);
    Ok(())
}
