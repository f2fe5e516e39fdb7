//! Run configuration: one JSON document plus `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthSpec;
use crate::planner::price_path::{parse_cases, CaseId};
use crate::planner::{BatterySpec, FeedbackMode, SolveMethod};
use crate::profiles::{CalendarRule, DayTypeMap};
use crate::scenarios::LevelProbabilities;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputsConfig {
    /// Generated from the run seed.
    Synthetic { year: i32 },
    /// `timestamp,value` CSV files; relative paths resolve against the
    /// config file's directory.
    Files {
        demand: PathBuf,
        solar: PathBuf,
        wind: PathBuf,
        price: PathBuf,
        micro_demand: PathBuf,
        micro_solar: PathBuf,
        #[serde(default = "default_timestamp_column")]
        timestamp_column: String,
        #[serde(default = "default_value_column")]
        value_column: String,
    },
}

fn default_timestamp_column() -> String {
    "timestamp".into()
}

fn default_value_column() -> String {
    "value".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: InputsConfig,
    pub calendar: CalendarRule,
    /// Planning resolution in minutes; inputs are normalized to 15 minutes
    /// and averaged onto this step after scenario composition.
    pub step_minutes: u32,
    pub levels: LevelProbabilities,
    /// Days per year of each day type; probabilities are their shares.
    pub day_counts: DayTypeMap<f64>,
    /// Keep only these scenario ids (probabilities renormalized).
    pub scenario_ids: Option<Vec<usize>>,
    pub growth: GrowthSpec,
    pub battery: BatterySpec,
    pub horizon_years: usize,
    pub discount_rate: f64,
    pub congestion_limit_mw: f64,
    pub allow_export: bool,
    pub annualization_days: f64,
    pub gas_turbine_mw: f64,
    pub existing_capacity_mwh: f64,
    /// Price cases such as `a-1..a-10,b-1..b-10`.
    pub cases: String,
    /// Multiplies every battery price path.
    pub price_scale: f64,
    pub feedback: FeedbackMode,
    pub method: SolveMethod,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: InputsConfig::Synthetic { year: 2015 },
            calendar: CalendarRule::default(),
            step_minutes: 15,
            levels: LevelProbabilities::default(),
            day_counts: DayTypeMap { swd: 96.0, sed: 36.0, nswd: 165.0, nsed: 68.0 },
            scenario_ids: None,
            growth: GrowthSpec::default(),
            battery: BatterySpec::default(),
            horizon_years: 15,
            discount_rate: 0.05,
            congestion_limit_mw: 45.0,
            allow_export: false,
            annualization_days: 365.0,
            gas_turbine_mw: 20.0,
            existing_capacity_mwh: 0.0,
            cases: "a-1..a-10,b-1..b-10".into(),
            price_scale: 1.0,
            feedback: FeedbackMode::Off,
            method: SolveMethod::Auto,
            seed: 2015,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{source_name}: {e}")))
    }

    /// Reads a config file and resolves relative input paths against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text, &path.display().to_string())?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        if let InputsConfig::Files { demand, solar, wind, price, micro_demand, micro_solar, .. } = &mut self.inputs {
            for p in [demand, solar, wind, price, micro_demand, micro_solar] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
    }

    /// Applies `a.b.c=value` overrides. The value is parsed as JSON when it
    /// can be, otherwise taken as a string.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut doc = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not of the form key=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
            let mut node = &mut doc;
            let parts: Vec<&str> = key.split('.').collect();
            for (depth, part) in parts.iter().enumerate() {
                let obj = node
                    .as_object_mut()
                    .ok_or_else(|| Error::Config(format!("override `{key}`: `{}` is not an object", parts[..depth].join("."))))?;
                if depth + 1 == parts.len() {
                    obj.insert(part.to_string(), value.clone());
                    break;
                }
                node = obj.entry(part.to_string()).or_insert_with(|| serde_json::Value::Object(Default::default()));
            }
        }
        let cfg: RunConfig = serde_json::from_value(doc).map_err(|e| Error::Config(format!("after overrides: {e}")))?;
        Ok(cfg)
    }

    pub fn case_ids(&self) -> Result<Vec<CaseId>> {
        parse_cases(&self.cases)
    }

    pub fn validate(&self) -> Result<()> {
        self.calendar.validate()?;
        self.growth.validate()?;
        self.battery.validate()?;
        self.case_ids()?;
        if self.horizon_years == 0 {
            return Err(Error::Config("horizon_years must be at least 1".into()));
        }
        if self.step_minutes == 0 || 1440 % self.step_minutes != 0 || !self.step_minutes.is_multiple_of(15) {
            return Err(Error::Config(format!("step_minutes {} must be a multiple of 15 that divides a day", self.step_minutes)));
        }
        if !(self.price_scale > 0.0 && self.price_scale.is_finite()) {
            return Err(Error::Config(format!("price_scale must be positive, got {}", self.price_scale)));
        }
        Ok(())
    }
}
