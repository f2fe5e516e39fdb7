//! Year of raw series → representative days and price model.

use crate::clustering::{demand_clusters, kmeans_two, ClusterResult};
use crate::error::{Error, Result};
use crate::market::{fit_price, net_demand, MarketState, PriceModel};
use crate::profiles::{classify_day, resample, CalendarRule, DayTypeMap, Profile};
use crate::scenarios::{LevelPair, ScenarioInputs};

/// The six aligned series a study starts from.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSeries {
    pub demand: Profile,
    pub solar: Profile,
    pub wind: Profile,
    pub price: Profile,
    pub micro_demand: Profile,
    pub micro_solar: Profile,
}

impl InputSeries {
    pub const NAMES: [&'static str; 6] = ["demand", "solar", "wind", "price", "micro_demand", "micro_solar"];

    pub fn all(&self) -> [&Profile; 6] {
        [&self.demand, &self.solar, &self.wind, &self.price, &self.micro_demand, &self.micro_solar]
    }

    pub fn validate(&self) -> Result<()> {
        let first = &self.demand;
        for (name, p) in Self::NAMES.iter().zip(self.all()) {
            if p.len() != first.len() || p.step_minutes != first.step_minutes || p.start != first.start {
                return Err(Error::Alignment(format!(
                    "{name}: {} samples at {} min from {:?}, demand has {} at {} min from {:?}",
                    p.len(),
                    p.step_minutes,
                    p.start,
                    first.len(),
                    first.step_minutes,
                    first.start
                )));
            }
        }
        Ok(())
    }

    pub fn resampled(&self, step_minutes: u32) -> Result<InputSeries> {
        Ok(InputSeries {
            demand: resample(&self.demand, step_minutes)?,
            solar: resample(&self.solar, step_minutes)?,
            wind: resample(&self.wind, step_minutes)?,
            price: resample(&self.price, step_minutes)?,
            micro_demand: resample(&self.micro_demand, step_minutes)?,
            micro_solar: resample(&self.micro_solar, step_minutes)?,
        })
    }
}

/// Representative days of every input.
#[derive(Debug, Clone, PartialEq)]
pub struct Clusters {
    pub solar: ClusterResult,
    pub wind: ClusterResult,
    pub micro_solar: ClusterResult,
    pub demand: DayTypeMap<Profile>,
    pub micro_demand: DayTypeMap<Profile>,
}

impl Clusters {
    pub fn scenario_inputs(&self) -> ScenarioInputs {
        let pair = |c: &ClusterResult| LevelPair { high: c.high.clone(), low: c.low.clone() };
        ScenarioInputs {
            demand: self.demand.clone(),
            solar: pair(&self.solar),
            wind: pair(&self.wind),
            micro_demand: self.micro_demand.clone(),
            micro_solar: pair(&self.micro_solar),
        }
    }
}

fn day_profiles(p: &Profile) -> Result<Vec<Profile>> {
    Ok(p.days()?.into_iter().map(|(_, d)| d).collect())
}

pub fn cluster_all(series: &InputSeries, rule: &CalendarRule, seed: u64) -> Result<Clusters> {
    series.validate()?;
    Ok(Clusters {
        solar: kmeans_two(&day_profiles(&series.solar)?, seed)?,
        wind: kmeans_two(&day_profiles(&series.wind)?, seed)?,
        micro_solar: kmeans_two(&day_profiles(&series.micro_solar)?, seed)?,
        demand: demand_clusters(&series.demand.days()?, rule)?,
        micro_demand: demand_clusters(&series.micro_demand.days()?, rule)?,
    })
}

/// One price fit per day type over every slot of that day type.
pub fn fit_price_model(series: &InputSeries, rule: &CalendarRule) -> Result<PriceModel> {
    series.validate()?;
    let net = net_demand(&MarketState { demand: series.demand.clone(), solar: series.solar.clone(), wind: series.wind.clone() })?;
    let mut points: DayTypeMap<Vec<(f64, f64)>> = DayTypeMap::default();
    for ((date, n), (_, p)) in net.days()?.into_iter().zip(series.price.days()?) {
        points.get_mut(classify_day(date, rule)).extend(n.values.iter().copied().zip(p.values.iter().copied()));
    }
    Ok(PriceModel::constant(points.try_map(|d, pts| fit_price(pts, d))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::DayType;
    use crate::synthetic::{generate, SyntheticSpec};

    #[test]
    fn synthetic_year_recovers_its_price_model() {
        let spec = SyntheticSpec::default();
        let rule = CalendarRule::default();
        let series = generate(&spec, &rule, 3);
        let model = fit_price_model(&series, &rule).unwrap();
        for d in DayType::ALL {
            let f = model.base.get(d);
            assert!((f.alpha - spec.price_alpha.get(d)).abs() < 1e-4, "{d}: {f:?}");
            assert!(f.rmse < 2.0 * spec.price_noise);
        }
        let c = cluster_all(&series, &rule, 3).unwrap();
        assert!(c.solar.high.energy() > 1.3 * c.solar.low.energy());
        assert!(c.wind.high.energy() > 2.0 * c.wind.low.energy());
        assert_eq!(c.solar.assignments.len(), 365);
        let peak = c.micro_demand.swd.values.iter().cloned().fold(0.0, f64::max);
        assert!((peak - 42.0).abs() < 1.0, "{peak}");
    }
}
