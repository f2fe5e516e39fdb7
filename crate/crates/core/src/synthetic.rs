//! Seeded synthetic year of market and microgrid series at 15-minute
//! resolution, shaped like a large summer-peaking market with a campus-style
//! microgrid. For demos and tests; not measured data.

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::pipeline::InputSeries;
use crate::profiles::{classify_day, CalendarRule, DayType, DayTypeMap, Profile, ProfileKind};

const STEP_MINUTES: u32 = 15;
const SLOTS: usize = 96;

/// Knobs of the generator. Powers in MW.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub year: i32,
    pub market_peak: DayTypeMap<f64>,
    pub market_base: DayTypeMap<f64>,
    pub market_solar_peak: f64,
    pub market_wind_capacity: f64,
    /// Share of clear-sky days.
    pub clear_day_share: f64,
    /// Share of windy days.
    pub windy_day_share: f64,
    /// True price slope per day type, $/MWh per MW of net demand.
    pub price_alpha: DayTypeMap<f64>,
    pub price_beta: DayTypeMap<f64>,
    pub price_noise: f64,
    pub micro_peak: DayTypeMap<f64>,
    pub micro_base: DayTypeMap<f64>,
    pub micro_solar_peak: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            year: 2015,
            market_peak: DayTypeMap { swd: 45_000.0, sed: 38_000.0, nswd: 33_000.0, nsed: 29_000.0 },
            market_base: DayTypeMap { swd: 22_000.0, sed: 20_000.0, nswd: 19_000.0, nsed: 18_000.0 },
            market_solar_peak: 5_700.0,
            market_wind_capacity: 2_000.0,
            clear_day_share: 0.30,
            windy_day_share: 0.40,
            price_alpha: DayTypeMap { swd: 0.0016, sed: 0.0013, nswd: 0.0012, nsed: 0.0011 },
            price_beta: DayTypeMap { swd: -12.0, sed: -8.0, nswd: -4.0, nsed: -2.0 },
            price_noise: 1.5,
            micro_peak: DayTypeMap { swd: 42.0, sed: 36.0, nswd: 35.0, nsed: 32.0 },
            micro_base: DayTypeMap { swd: 34.0, sed: 34.0, nswd: 30.0, nsed: 30.0 },
            micro_solar_peak: 10.0,
        }
    }
}

fn bump(h: f64, center: f64, width: f64) -> f64 {
    (-((h - center) / width).powi(2)).exp()
}

/// Clear-sky shape in [0, 1]; longer days in summer.
fn clear_sky(h: f64, summer: bool) -> f64 {
    let (rise, set) = if summer { (6.0, 20.0) } else { (7.0, 17.5) };
    if h <= rise || h >= set {
        0.0
    } else {
        (std::f64::consts::PI * (h - rise) / (set - rise)).sin().powf(1.5)
    }
}

/// Evening-peaking market shape with a smaller late-morning shoulder.
fn market_shape(h: f64) -> f64 {
    bump(h, 18.5, 3.2).max(0.75 * bump(h, 11.0, 3.5)).max(0.05)
}

/// Campus-style microgrid shape peaking in the early afternoon.
fn micro_shape(h: f64) -> f64 {
    bump(h, 14.0, 4.0)
}

pub fn generate(spec: &SyntheticSpec, rule: &CalendarRule, seed: u64) -> InputSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let first = NaiveDate::from_ymd_opt(spec.year, 1, 1).expect("valid year");
    let days = NaiveDate::from_ymd_opt(spec.year + 1, 1, 1).expect("valid year").signed_duration_since(first).num_days();

    let cap = 96 * days as usize;
    let (mut demand, mut solar, mut wind, mut price, mut micro, mut micro_solar) =
        (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    let mut wind_state: f64 = 0.0;
    for d in 0..days {
        let date = first + chrono::Duration::days(d);
        let dt = classify_day(date, rule);
        let summer = matches!(dt, DayType::SWD | DayType::SED);
        let clear = rng.random_bool(spec.clear_day_share);
        let windy = rng.random_bool(spec.windy_day_share);
        let demand_scale = 1.0 + 0.03 * unit.sample(&mut rng);
        let cloud = if clear { 0.95 + 0.05 * rng.random::<f64>() } else { 0.35 + 0.3 * rng.random::<f64>() };
        let wind_level = if windy { 0.55 + 0.15 * rng.random::<f64>() } else { 0.12 + 0.1 * rng.random::<f64>() };
        let micro_scale = 1.0 + 0.01 * unit.sample(&mut rng);
        for t in 0..SLOTS {
            let h = (t as f64 + 0.5) / 4.0;
            let (peak, base) = (*spec.market_peak.get(dt), *spec.market_base.get(dt));
            let dem = (base + (peak - base) * market_shape(h)) * demand_scale * (1.0 + 0.005 * unit.sample(&mut rng));
            let sky = clear_sky(h, summer);
            let flicker = if clear { 1.0 } else { (1.0 + 0.15 * unit.sample(&mut rng)).clamp(0.5, 1.3) };
            let sol = (spec.market_solar_peak * sky * cloud * flicker).max(0.0);
            wind_state = 0.9 * wind_state + 0.05 * unit.sample(&mut rng);
            let diurnal = 1.0 + 0.3 * (2.0 * std::f64::consts::PI * (h - 22.0) / 24.0).cos();
            let wnd = (spec.market_wind_capacity * wind_level * diurnal * (1.0 + wind_state)).clamp(0.0, spec.market_wind_capacity);
            let net = dem - sol - wnd;
            let lam = spec.price_alpha.get(dt) * net + spec.price_beta.get(dt) + spec.price_noise * unit.sample(&mut rng);
            let (mpeak, mbase) = (*spec.micro_peak.get(dt), *spec.micro_base.get(dt));
            let mdem = (mbase + (mpeak - mbase) * micro_shape(h)) * micro_scale * (1.0 + 0.01 * unit.sample(&mut rng));
            // Local cloud cover is patchier than the market-wide average.
            let local = if clear { 1.0 } else { rng.random_range(0.2..1.1) };
            let msol = (spec.micro_solar_peak * sky * cloud * local).min(spec.micro_solar_peak);
            demand.push(dem);
            solar.push(sol);
            wind.push(wnd);
            price.push(lam);
            micro.push(mdem.max(0.0));
            micro_solar.push(msol.max(0.0));
        }
    }
    let start = Some(NaiveDateTime::new(first, NaiveTime::MIN));
    let mk = |kind, values| Profile { kind, step_minutes: STEP_MINUTES, start, values };
    InputSeries {
        demand: mk(ProfileKind::Demand, demand),
        solar: mk(ProfileKind::Solar, solar),
        wind: mk(ProfileKind::Wind, wind),
        price: mk(ProfileKind::Price, price),
        micro_demand: mk(ProfileKind::Demand, micro),
        micro_solar: mk(ProfileKind::Solar, micro_solar),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_year_and_deterministic() {
        let rule = CalendarRule::default();
        let a = generate(&SyntheticSpec::default(), &rule, 7);
        assert_eq!(a.demand.len(), 365 * 96);
        assert_eq!(a, generate(&SyntheticSpec::default(), &rule, 7));
        assert_ne!(a.price.values, generate(&SyntheticSpec::default(), &rule, 8).price.values);
        assert!(a.micro_solar.values.iter().all(|&v| (0.0..=10.0).contains(&v)));
        assert!(a.solar.values.iter().all(|&v| v >= 0.0));
        let peak = a.demand.values.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 40_000.0 && peak < 52_000.0, "{peak}");
    }
}
