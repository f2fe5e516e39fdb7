#![allow(dead_code)]

use bess_planner::clustering::Level;
use bess_planner::config::RunConfig;
use bess_planner::market::{PriceFit, PriceModel};
use bess_planner::planner::price_path::PricePath;
use bess_planner::planner::{BatterySpec, PlanProblem};
use bess_planner::profiles::{DayType, DayTypeMap};
use bess_planner::scenarios::{Scenario, ScenarioDay, ScenarioSet};

pub fn flat_model(alpha: f64, beta: f64) -> PriceModel {
    PriceModel::constant(DayTypeMap::from_fn(|_| PriceFit { alpha, beta, rmse: 0.0 }))
}

pub fn only_scenario() -> Scenario {
    Scenario { id: 1, day_type: DayType::SWD, solar_level: Level::High, wind_level: Level::High, probability: 1.0 }
}

/// One scenario, the same day in every year; no gas turbine, no
/// discounting, one day per year.
pub fn single_day_problem(load: Vec<f64>, solar: Vec<f64>, price: Vec<f64>, years: usize, battery_price: f64) -> PlanProblem {
    let n = load.len();
    let day = ScenarioDay::from_series(load, solar, vec![0.0; n], price).unwrap();
    let set = ScenarioSet::from_days(vec![only_scenario()], flat_model(0.0, 0.0), vec![vec![day]; years]).unwrap();
    let mut p = PlanProblem::new(set, PricePath::constant("toy", battery_price, years));
    p.battery = BatterySpec { soc_min_frac: 0.0, soc_max_frac: 1.0, power_energy_ratio: 2.0, ..BatterySpec::default() };
    p.discount_rate = 0.0;
    p.annualization_days = 1.0;
    p.gas_turbine_mw = 0.0;
    p
}

/// Minimum daily cost of the toy day over a grid of SOC trajectories.
/// SOC levels are multiples of 1/24 MWh; the day is cyclic.
pub fn toy_grid_oracle(capacity: f64, load: f64, prices: &[f64], dt: f64) -> f64 {
    let levels = 24;
    let soc = |k: usize| capacity * k as f64 / levels as f64;
    let n = prices.len();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; n];
    loop {
        let mut cost = 0.0;
        let mut ok = true;
        for t in 0..n {
            let prev = soc(idx[(t + n - 1) % n]);
            let injection = (prev - soc(idx[t])) / dt;
            let purchase = load - injection;
            if purchase < -1e-12 || injection.abs() > 2.0 * capacity + 1e-12 {
                ok = false;
                break;
            }
            cost += prices[t] * purchase * dt;
        }
        if ok {
            best = best.min(cost);
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] <= levels {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return best;
        }
    }
}

pub const TOY_PRICES: [f64; 4] = [10.0, 10.0, 50.0, 50.0];

/// Four 6-hour slots, 1 MW load, 0.5 MWh of free capacity, prohibitive
/// battery price.
pub fn toy_arbitrage() -> PlanProblem {
    let mut p = single_day_problem(vec![1.0; 4], vec![0.0; 4], TOY_PRICES.to_vec(), 1, 1e6);
    p.existing_capacity_mwh = 0.5;
    p
}

/// Two 12-hour slots at market net demand `net`, 1 MW load, 10 MWh of free
/// capacity, price `alpha·(net + p) + beta`.
pub fn feedback_toy(alpha: f64, beta: f64, net: [f64; 2]) -> PlanProblem {
    let price: Vec<f64> = net.iter().map(|n| alpha * n + beta).collect();
    let day = ScenarioDay::from_series(vec![1.0; 2], vec![0.0; 2], net.to_vec(), price).unwrap();
    let set = ScenarioSet::from_days(vec![only_scenario()], flat_model(alpha, beta), vec![vec![day]]).unwrap();
    let mut p = PlanProblem::new(set, PricePath::constant("feedback-toy", 1e6, 1));
    p.battery = BatterySpec { soc_min_frac: 0.0, soc_max_frac: 1.0, ..BatterySpec::default() };
    p.discount_rate = 0.0;
    p.annualization_days = 1.0;
    p.gas_turbine_mw = 0.0;
    p.existing_capacity_mwh = 10.0;
    p
}

/// Synthetic-data configuration with `years` plan years, one low-solar
/// low-wind scenario per day type and hourly slots.
pub fn desk_config(years: usize) -> RunConfig {
    RunConfig::default()
        .with_overrides(&[
            format!("horizon_years={years}"),
            "step_minutes=60".into(),
            "scenario_ids=[4,8,12,16]".into(),
            "cases=a-1".into(),
        ])
        .unwrap()
}
