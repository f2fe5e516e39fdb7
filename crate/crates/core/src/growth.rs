//! Annual growth of renewable output and demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{DayType, DayTypeMap, Profile};

/// Demand growth in percent per year, either one number or one per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Adgp {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Adgp {
    fn validate(&self, what: &str) -> Result<()> {
        let bad = |v: f64| !v.is_finite() || v <= -100.0;
        match self {
            Adgp::Scalar(v) if bad(*v) => Err(Error::Config(format!("{what}: growth {v}% must exceed -100%"))),
            Adgp::Vector(vs) => {
                if vs.is_empty() {
                    return Err(Error::Config(format!("{what}: empty growth profile")));
                }
                match vs.iter().find(|v| bad(**v)) {
                    Some(v) => Err(Error::Config(format!("{what}: growth {v}% must exceed -100%"))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

/// Synthetic summer profile: 2% off-peak, 4% from 17:00 to 21:00 with
/// two-hour linear ramps on either side. A demo default, not measured data.
pub fn default_summer_adgp() -> Vec<f64> {
    (0..96)
        .map(|k| {
            let h = k as f64 / 4.0;
            let up = ((h - 15.0) / 2.0).clamp(0.0, 1.0);
            let down = ((23.0 - h) / 2.0).clamp(0.0, 1.0);
            2.0 + 2.0 * up.min(down)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthSpec {
    /// Market solar, % per year.
    pub asg_percent: f64,
    /// Market wind, % per year.
    pub awg_percent: f64,
    /// Market demand per day type.
    pub adgp: DayTypeMap<Adgp>,
    pub micro_demand_percent: f64,
    pub micro_solar_percent: f64,
}

impl Default for GrowthSpec {
    fn default() -> Self {
        let summer = Adgp::Vector(default_summer_adgp());
        GrowthSpec {
            asg_percent: 7.0,
            awg_percent: 7.0,
            adgp: DayTypeMap { swd: summer.clone(), sed: summer, nswd: Adgp::Scalar(2.0), nsed: Adgp::Scalar(2.0) },
            micro_demand_percent: 3.0,
            micro_solar_percent: 3.0,
        }
    }
}

impl GrowthSpec {
    pub fn none() -> Self {
        GrowthSpec {
            asg_percent: 0.0,
            awg_percent: 0.0,
            adgp: DayTypeMap::from_fn(|_| Adgp::Scalar(0.0)),
            micro_demand_percent: 0.0,
            micro_solar_percent: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("asg_percent", self.asg_percent),
            ("awg_percent", self.awg_percent),
            ("micro_demand_percent", self.micro_demand_percent),
            ("micro_solar_percent", self.micro_solar_percent),
        ] {
            Adgp::Scalar(v).validate(name)?;
        }
        for (d, a) in self.adgp.iter() {
            a.validate(&format!("adgp.{d}"))?;
        }
        Ok(())
    }

    pub fn adgp(&self, d: DayType) -> &Adgp {
        self.adgp.get(d)
    }
}

/// `(1 + rate/100)^years`.
pub fn compound_factor(rate_percent: f64, years: u32) -> f64 {
    (1.0 + rate_percent / 100.0).powi(years as i32)
}

/// One year of solar growth.
pub fn grow_solar(s: &Profile, asg_percent: f64) -> Profile {
    s.scaled(1.0 + asg_percent / 100.0)
}

/// One year of wind growth.
pub fn grow_wind(w: &Profile, awg_percent: f64) -> Profile {
    w.scaled(1.0 + awg_percent / 100.0)
}

/// One year of demand growth; a vector applies slot by slot.
pub fn grow_demand(d: &Profile, adgp: &Adgp) -> Result<Profile> {
    grow_demand_years(d, adgp, 1)
}

/// `years` applications of [`grow_demand`] folded into one compound factor
/// per slot.
pub fn grow_demand_years(d: &Profile, adgp: &Adgp, years: u32) -> Result<Profile> {
    match adgp {
        Adgp::Scalar(r) => Ok(d.scaled(compound_factor(*r, years))),
        Adgp::Vector(rates) => {
            if rates.len() != d.len() {
                return Err(Error::Alignment(format!(
                    "demand growth profile has {} entries, demand profile has {}",
                    rates.len(),
                    d.len()
                )));
            }
            let values = d.values.iter().zip(rates).map(|(v, r)| v * compound_factor(*r, years)).collect();
            Ok(Profile { values, ..d.clone() })
        }
    }
}
