//! End-to-end assembly of a study from a [`RunConfig`].

use crate::config::{InputsConfig, RunConfig};
use crate::error::Result;
use crate::market::PriceModel;
use crate::pipeline::{cluster_all, fit_price_model, Clusters, InputSeries};
use crate::planner::price_path::{price_path, CaseId, PricePath};
use crate::planner::PlanProblem;
use crate::profiles::{load_timeseries, resample, ColumnMap, ProfileKind};
use crate::scenarios::{build_scenarios, day_probabilities, ScenarioSet};
use crate::synthetic::{generate, SyntheticSpec};

/// Resolution every input is normalized to before clustering.
pub const NATIVE_STEP_MINUTES: u32 = 15;

/// Reads (or generates) the six input series at 15-minute resolution.
pub fn load_inputs(cfg: &RunConfig) -> Result<InputSeries> {
    let series = match &cfg.inputs {
        InputsConfig::Synthetic { year } => {
            let spec = SyntheticSpec { year: *year, ..SyntheticSpec::default() };
            generate(&spec, &cfg.calendar, cfg.seed)
        }
        InputsConfig::Files { demand, solar, wind, price, micro_demand, micro_solar, timestamp_column, value_column } => {
            let cols = ColumnMap { timestamp: timestamp_column.clone(), value: value_column.clone() };
            let load = |p: &std::path::Path, kind| -> Result<_> {
                resample(&load_timeseries(p, &cols, kind)?, NATIVE_STEP_MINUTES)
            };
            InputSeries {
                demand: load(demand, ProfileKind::Demand)?,
                solar: load(solar, ProfileKind::Solar)?,
                wind: load(wind, ProfileKind::Wind)?,
                price: load(price, ProfileKind::Price)?,
                micro_demand: load(micro_demand, ProfileKind::Demand)?,
                micro_solar: load(micro_solar, ProfileKind::Solar)?,
            }
        }
    };
    series.validate()?;
    Ok(series)
}

pub fn clusters(cfg: &RunConfig, series: &InputSeries) -> Result<Clusters> {
    cluster_all(series, &cfg.calendar, cfg.seed)
}

pub fn price_model(cfg: &RunConfig, series: &InputSeries) -> Result<PriceModel> {
    fit_price_model(series, &cfg.calendar)
}

/// Scenario days for the whole horizon at the planning step.
pub fn scenario_set(cfg: &RunConfig, clusters: &Clusters, model: &PriceModel) -> Result<ScenarioSet> {
    let scenarios = build_scenarios(&cfg.levels, &day_probabilities(&cfg.day_counts)?)?;
    let mut set = ScenarioSet::compose(cfg.horizon_years, scenarios, &clusters.scenario_inputs(), &cfg.growth, model)?;
    if let Some(ids) = &cfg.scenario_ids {
        set = set.subset(ids)?;
    }
    if cfg.step_minutes != set.per_year[0][0].price.step_minutes {
        set = set.resampled(cfg.step_minutes)?;
    }
    Ok(set)
}

pub fn case_path(cfg: &RunConfig, case: CaseId) -> PricePath {
    let path = price_path(case, cfg.horizon_years);
    if cfg.price_scale == 1.0 {
        path
    } else {
        PricePath { label: path.label.clone(), ..path.scaled(cfg.price_scale) }
    }
}

pub fn plan_problem(cfg: &RunConfig, scenarios: ScenarioSet, path: PricePath) -> PlanProblem {
    PlanProblem {
        scenarios,
        battery: cfg.battery.clone(),
        price_path: path,
        discount_rate: cfg.discount_rate,
        congestion_limit_mw: cfg.congestion_limit_mw,
        allow_export: cfg.allow_export,
        annualization_days: cfg.annualization_days,
        gas_turbine_mw: cfg.gas_turbine_mw,
        existing_capacity_mwh: cfg.existing_capacity_mwh,
        feedback: cfg.feedback,
        method: cfg.method,
    }
}

/// Scenario set for `cfg` straight from its inputs.
pub fn prepare(cfg: &RunConfig) -> Result<ScenarioSet> {
    let series = load_inputs(cfg)?;
    let c = clusters(cfg, &series)?;
    let m = price_model(cfg, &series)?;
    scenario_set(cfg, &c, &m)
}
