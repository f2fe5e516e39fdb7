//! Joint day-type / solar-level / wind-level scenarios and their per-year
//! profile data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::Level;
use crate::error::{Error, Result};
use crate::growth::{compound_factor, grow_demand_years, GrowthSpec};
use crate::market::{eval_price_in_year, net_demand, MarketState, PriceModel};
use crate::profiles::{resample, DayType, DayTypeMap, Profile, ProfileKind};

const PROBABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// 1-based position in the standard ordering.
    pub id: usize,
    pub day_type: DayType,
    pub solar_level: Level,
    pub wind_level: Level,
    pub probability: f64,
}

impl Scenario {
    /// Short label such as `SWD-HS-LW`.
    pub fn label(&self) -> String {
        format!("{}-{}S-{}W", self.day_type, self.solar_level.as_char(), self.wind_level.as_char())
    }
}

/// Probability of the high level; the low level gets the complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelProbabilities {
    pub high_solar: f64,
    pub high_wind: f64,
}

impl Default for LevelProbabilities {
    fn default() -> Self {
        LevelProbabilities { high_solar: 0.30, high_wind: 0.40 }
    }
}

impl LevelProbabilities {
    pub fn solar(&self, l: Level) -> f64 {
        match l {
            Level::High => self.high_solar,
            Level::Low => 1.0 - self.high_solar,
        }
    }

    pub fn wind(&self, l: Level) -> f64 {
        match l {
            Level::High => self.high_wind,
            Level::Low => 1.0 - self.high_wind,
        }
    }
}

/// Day-type probabilities from day counts, e.g. `96/365`.
pub fn day_probabilities(counts: &DayTypeMap<f64>) -> Result<DayTypeMap<f64>> {
    let total: f64 = counts.iter().map(|(_, c)| *c).sum();
    if counts.iter().any(|(_, c)| !c.is_finite() || *c < 0.0) || total <= 0.0 {
        return Err(Error::Validation(format!("invalid day counts {counts:?}")));
    }
    Ok(counts.map(|_, c| c / total))
}

/// Level combinations within one day type, in scenario order.
pub const LEVEL_ORDER: [(Level, Level); 4] =
    [(Level::High, Level::High), (Level::Low, Level::High), (Level::High, Level::Low), (Level::Low, Level::Low)];

/// The 16 scenarios as the product of independent level and day-type
/// probabilities. Ordered by day type (SWD, SED, NSWD, NSED), then by
/// `LEVEL_ORDER` (solar, wind).
pub fn build_scenarios(levels: &LevelProbabilities, day_probs: &DayTypeMap<f64>) -> Result<Vec<Scenario>> {
    for (name, p) in [("solar", levels.high_solar), ("wind", levels.high_wind)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("{name} high-level probability {p} outside [0, 1]")));
        }
    }
    let mut total = 0.0;
    for (d, &p) in day_probs.iter() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("{d} probability {p} outside [0, 1]")));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::Validation(format!("day-type probabilities sum to {total}, not 1")));
    }
    let mut out = Vec::with_capacity(16);
    for d in DayType::ALL {
        for (s, w) in LEVEL_ORDER {
            out.push(Scenario {
                id: out.len() + 1,
                day_type: d,
                solar_level: s,
                wind_level: w,
                probability: levels.solar(s) * levels.wind(w) * day_probs.get(d),
            });
        }
    }
    Ok(out)
}

/// High and low representative days of one renewable source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPair {
    pub high: Profile,
    pub low: Profile,
}

impl LevelPair {
    pub fn get(&self, l: Level) -> &Profile {
        match l {
            Level::High => &self.high,
            Level::Low => &self.low,
        }
    }
}

/// Year-1 representative days for the market and the microgrid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInputs {
    pub demand: DayTypeMap<Profile>,
    pub solar: LevelPair,
    pub wind: LevelPair,
    pub micro_demand: DayTypeMap<Profile>,
    pub micro_solar: LevelPair,
}

impl ScenarioInputs {
    fn check(&self) -> Result<usize> {
        let mut all: Vec<(&str, &Profile)> = Vec::new();
        for d in DayType::ALL {
            all.push(("demand", self.demand.get(d)));
            all.push(("micro_demand", self.micro_demand.get(d)));
        }
        for (name, pair) in [("solar", &self.solar), ("wind", &self.wind), ("micro_solar", &self.micro_solar)] {
            all.push((name, &pair.high));
            all.push((name, &pair.low));
        }
        let (_, first) = all[0];
        for (name, p) in &all {
            if p.is_empty() {
                return Err(Error::Coverage(format!("{name}: empty representative day")));
            }
            if p.len() != first.len() || p.step_minutes != first.step_minutes || p.len() != p.slots_per_day() {
                return Err(Error::Alignment(format!(
                    "{name}: {} samples at {} min, expected one day of {} samples at {} min",
                    p.len(),
                    p.step_minutes,
                    first.len(),
                    first.step_minutes
                )));
            }
        }
        Ok(first.len())
    }
}

/// Everything the planner needs for one (year, scenario) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDay {
    pub demand: Profile,
    pub solar: Profile,
    pub wind: Profile,
    /// Market demand − solar − wind.
    pub net: Profile,
    pub micro_demand: Profile,
    pub micro_solar: Profile,
    /// Exogenous price from the price model at `net`.
    pub price: Profile,
}

impl ScenarioDay {
    /// A day given directly by its series; the step follows from the sample
    /// count. Market demand and solar carry the positive and negative parts
    /// of `net`, and market wind is zero.
    pub fn from_series(micro_demand: Vec<f64>, micro_solar: Vec<f64>, net: Vec<f64>, price: Vec<f64>) -> Result<ScenarioDay> {
        let n = net.len();
        Ok(ScenarioDay {
            demand: Profile::daily(ProfileKind::Demand, net.iter().map(|v| v.max(0.0)).collect())?,
            solar: Profile::daily(ProfileKind::Solar, net.iter().map(|v| (-v).max(0.0)).collect())?,
            wind: Profile::daily(ProfileKind::Wind, vec![0.0; n])?,
            net: Profile::daily(ProfileKind::Net, net)?,
            micro_demand: Profile::daily(ProfileKind::Demand, micro_demand)?,
            micro_solar: Profile::daily(ProfileKind::Solar, micro_solar)?,
            price: Profile::daily(ProfileKind::Price, price)?,
        })
    }

    fn profiles(&self) -> [&Profile; 7] {
        [&self.demand, &self.solar, &self.wind, &self.net, &self.micro_demand, &self.micro_solar, &self.price]
    }

    fn resampled(&self, step: u32) -> Result<ScenarioDay> {
        Ok(ScenarioDay {
            demand: resample(&self.demand, step)?,
            solar: resample(&self.solar, step)?,
            wind: resample(&self.wind, step)?,
            net: resample(&self.net, step)?,
            micro_demand: resample(&self.micro_demand, step)?,
            micro_solar: resample(&self.micro_solar, step)?,
            price: resample(&self.price, step)?,
        })
    }
}

/// Scenario data for plan year `year` (1-based): year 1 is the raw
/// representative data, each later year applies one more year of growth.
pub fn compose_year(
    year: usize,
    scenarios: &[Scenario],
    inputs: &ScenarioInputs,
    growth: &GrowthSpec,
    price_model: &PriceModel,
) -> Result<Vec<ScenarioDay>> {
    if year == 0 {
        return Err(Error::Validation("plan years are numbered from 1".into()));
    }
    inputs.check()?;
    let n = (year - 1) as u32;
    scenarios
        .iter()
        .map(|s| {
            let demand = grow_demand_years(inputs.demand.get(s.day_type), growth.adgp(s.day_type), n)?;
            let solar = inputs.solar.get(s.solar_level).scaled(compound_factor(growth.asg_percent, n));
            let wind = inputs.wind.get(s.wind_level).scaled(compound_factor(growth.awg_percent, n));
            let micro_demand = inputs.micro_demand.get(s.day_type).scaled(compound_factor(growth.micro_demand_percent, n));
            let micro_solar = inputs.micro_solar.get(s.solar_level).scaled(compound_factor(growth.micro_solar_percent, n));
            let net = net_demand(&MarketState { demand: demand.clone(), solar: solar.clone(), wind: wind.clone() })?;
            let price = eval_price_in_year(price_model, year, s.day_type, &net);
            Ok(ScenarioDay { demand, solar, wind, net, micro_demand, micro_solar, price })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    pub price_model: PriceModel,
    /// `per_year[y - 1][k]` belongs to plan year `y` and `scenarios[k]`.
    pub per_year: Vec<Vec<ScenarioDay>>,
}

impl ScenarioSet {
    /// Composes every year of the horizon. Years are independent and are
    /// composed in parallel.
    pub fn compose(
        horizon: usize,
        scenarios: Vec<Scenario>,
        inputs: &ScenarioInputs,
        growth: &GrowthSpec,
        price_model: &PriceModel,
    ) -> Result<ScenarioSet> {
        if horizon == 0 {
            return Err(Error::Validation("horizon must be at least 1 year".into()));
        }
        growth.validate()?;
        price_model.validate()?;
        let per_year = (1..=horizon)
            .into_par_iter()
            .map(|y| compose_year(y, &scenarios, inputs, growth, price_model))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioSet { scenarios, price_model: price_model.clone(), per_year })
    }

    /// A set from explicit days, `per_year[y - 1][k]` for `scenarios[k]`.
    pub fn from_days(scenarios: Vec<Scenario>, price_model: PriceModel, per_year: Vec<Vec<ScenarioDay>>) -> Result<ScenarioSet> {
        let set = ScenarioSet { scenarios, price_model, per_year };
        let diags = validate(&set);
        if diags.is_empty() {
            Ok(set)
        } else {
            Err(Error::Validation(diags.join("; ")))
        }
    }

    pub fn horizon(&self) -> usize {
        self.per_year.len()
    }

    pub fn slots(&self) -> usize {
        self.per_year.first().and_then(|y| y.first()).map_or(0, |d| d.price.len())
    }

    pub fn step_hours(&self) -> f64 {
        self.per_year.first().and_then(|y| y.first()).map_or(0.0, |d| d.price.step_hours())
    }

    pub fn day(&self, year: usize, k: usize) -> &ScenarioDay {
        &self.per_year[year - 1][k]
    }

    /// Keeps the scenarios with the given ids and rescales their
    /// probabilities to sum to one.
    pub fn subset(&self, ids: &[usize]) -> Result<ScenarioSet> {
        let mut keep = Vec::new();
        for &id in ids {
            let k = self
                .scenarios
                .iter()
                .position(|s| s.id == id)
                .ok_or_else(|| Error::Coverage(format!("scenario {id} is not in the set")))?;
            if keep.contains(&k) {
                return Err(Error::Config(format!("scenario {id} listed twice")));
            }
            keep.push(k);
        }
        let mass: f64 = keep.iter().map(|&k| self.scenarios[k].probability).sum();
        if keep.is_empty() || mass <= 0.0 {
            return Err(Error::Config("scenario subset has zero probability".into()));
        }
        let scenarios =
            keep.iter().map(|&k| Scenario { probability: self.scenarios[k].probability / mass, ..self.scenarios[k] }).collect();
        let per_year = self.per_year.iter().map(|days| keep.iter().map(|&k| days[k].clone()).collect()).collect();
        Ok(ScenarioSet { scenarios, price_model: self.price_model.clone(), per_year })
    }

    /// Truncates to the first `years` plan years.
    pub fn truncated(&self, years: usize) -> Result<ScenarioSet> {
        if years == 0 || years > self.horizon() {
            return Err(Error::Config(format!("cannot take {years} years from a {}-year set", self.horizon())));
        }
        Ok(ScenarioSet { per_year: self.per_year[..years].to_vec(), ..self.clone() })
    }

    /// Averages every profile onto a coarser step (or holds onto a finer
    /// one). Prices stay consistent because the price model is affine.
    pub fn resampled(&self, step_minutes: u32) -> Result<ScenarioSet> {
        let per_year = self
            .per_year
            .iter()
            .map(|days| days.iter().map(|d| d.resampled(step_minutes)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioSet { per_year, ..self.clone() })
    }
}

/// Lists every violated invariant; an empty list means the set is usable.
pub fn validate(set: &ScenarioSet) -> Vec<String> {
    let mut out = Vec::new();
    if set.scenarios.is_empty() {
        out.push("no scenarios".to_string());
    }
    let total: f64 = set.scenarios.iter().map(|s| s.probability).sum();
    if (total - 1.0).abs() > 1e-12 {
        out.push(format!("scenario probabilities sum to {total} ≠ 1"));
    }
    for s in &set.scenarios {
        if !(0.0..=1.0).contains(&s.probability) {
            out.push(format!("scenario {} probability {} outside [0, 1]", s.id, s.probability));
        }
    }
    if set.per_year.is_empty() {
        out.push("no plan years".to_string());
    }
    let slots = set.slots();
    for (y, days) in set.per_year.iter().enumerate() {
        if days.len() != set.scenarios.len() {
            out.push(format!(
                "year {}: {} scenario days for {} scenarios (missing coverage)",
                y + 1,
                days.len(),
                set.scenarios.len()
            ));
        }
        for (k, day) in days.iter().enumerate() {
            for p in day.profiles() {
                if p.len() != slots || p.len() != p.slots_per_day() {
                    out.push(format!("year {} scenario {}: {:?} profile has {} samples", y + 1, k + 1, p.kind, p.len()));
                }
                if p.values.iter().any(|v| !v.is_finite()) {
                    out.push(format!("year {} scenario {}: non-finite {:?} sample", y + 1, k + 1, p.kind));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::PriceFit;

    fn default_days() -> DayTypeMap<f64> {
        day_probabilities(&DayTypeMap { swd: 96.0, sed: 36.0, nswd: 165.0, nsed: 68.0 }).unwrap()
    }

    #[test]
    fn first_and_twelfth_scenarios() {
        let s = build_scenarios(&LevelProbabilities::default(), &default_days()).unwrap();
        assert_eq!(s.len(), 16);
        assert!((s[0].probability - 0.3 * 0.4 * 96.0 / 365.0).abs() < 1e-15);
        assert_eq!(s[11].day_type, DayType::NSWD);
        assert_eq!((s[11].solar_level, s[11].wind_level), (Level::Low, Level::Low));
        assert!((s[11].probability * 100.0 - 18.99).abs() < 0.01);
        assert_eq!(s[1].label(), "SWD-LS-HW");
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let days = DayTypeMap { swd: 0.5, sed: 0.5, nswd: 0.5, nsed: 0.0 };
        assert!(matches!(build_scenarios(&LevelProbabilities::default(), &days), Err(Error::Validation(_))));
    }

    fn flat(kind: ProfileKind, v: f64) -> Profile {
        Profile::daily(kind, vec![v; 4]).unwrap()
    }

    fn toy_inputs() -> ScenarioInputs {
        ScenarioInputs {
            demand: DayTypeMap::from_fn(|d| flat(ProfileKind::Demand, 100.0 + d.index() as f64)),
            solar: LevelPair { high: flat(ProfileKind::Solar, 30.0), low: flat(ProfileKind::Solar, 10.0) },
            wind: LevelPair { high: flat(ProfileKind::Wind, 20.0), low: flat(ProfileKind::Wind, 5.0) },
            micro_demand: DayTypeMap::from_fn(|_| flat(ProfileKind::Demand, 40.0)),
            micro_solar: LevelPair { high: flat(ProfileKind::Solar, 8.0), low: flat(ProfileKind::Solar, 2.0) },
        }
    }

    fn toy_model() -> PriceModel {
        PriceModel::constant(DayTypeMap::from_fn(|_| PriceFit { alpha: 0.5, beta: 1.0, rmse: 0.0 }))
    }

    #[test]
    fn compose_and_validate() {
        let scen = build_scenarios(&LevelProbabilities::default(), &default_days()).unwrap();
        let set = ScenarioSet::compose(3, scen, &toy_inputs(), &GrowthSpec::none(), &toy_model()).unwrap();
        assert!(validate(&set).is_empty(), "{:?}", validate(&set));
        let d = set.day(1, 0);
        assert_eq!(d.net.values, vec![50.0; 4]);
        assert_eq!(d.price.values, vec![26.0; 4]);
        assert_eq!(set.day(3, 0), set.day(1, 0));

        let mut broken = set.clone();
        broken.scenarios.iter_mut().for_each(|s| s.probability *= 0.5);
        assert!(validate(&broken).iter().any(|m| m.contains("sum")));
        let mut missing = set.clone();
        missing.per_year[1].pop();
        assert!(validate(&missing).iter().any(|m| m.contains("coverage")));
    }

    #[test]
    fn growth_applies_from_year_two() {
        let scen = build_scenarios(&LevelProbabilities::default(), &default_days()).unwrap();
        let growth = GrowthSpec { asg_percent: 10.0, ..GrowthSpec::none() };
        let set = ScenarioSet::compose(2, scen, &toy_inputs(), &growth, &toy_model()).unwrap();
        assert_eq!(set.day(1, 0).solar.values[0], 30.0);
        assert!((set.day(2, 0).solar.values[0] - 33.0).abs() < 1e-12);
    }

    #[test]
    fn subset_renormalizes() {
        let scen = build_scenarios(&LevelProbabilities::default(), &default_days()).unwrap();
        let set = ScenarioSet::compose(1, scen, &toy_inputs(), &GrowthSpec::none(), &toy_model()).unwrap();
        let sub = set.subset(&[1, 12]).unwrap();
        assert_eq!(sub.scenarios.len(), 2);
        assert!((sub.scenarios.iter().map(|s| s.probability).sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(set.subset(&[17]).is_err());
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let scen = build_scenarios(&LevelProbabilities::default(), &default_days()).unwrap();
        let mut inputs = toy_inputs();
        inputs.wind.low = Profile::daily(ProfileKind::Wind, vec![1.0; 24]).unwrap();
        let r = compose_year(1, &scen, &inputs, &GrowthSpec::none(), &toy_model());
        assert!(matches!(r, Err(Error::Alignment(_))));
    }
}
