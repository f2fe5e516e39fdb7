//! Power and price time series: ingestion, resampling and calendar
//! classification of days.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Weekday};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MINUTES_PER_DAY: u32 = 1440;
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Demand,
    Solar,
    Wind,
    Price,
    /// Demand net of renewables or of battery injection; may be negative.
    Net,
}

impl ProfileKind {
    fn allows_negative(self) -> bool {
        matches!(self, ProfileKind::Price | ProfileKind::Net)
    }
}

/// Uniformly sampled series in MW (or $/MWh for prices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub kind: ProfileKind,
    pub step_minutes: u32,
    /// Timestamp of the first sample; representative days have none.
    pub start: Option<NaiveDateTime>,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn new(kind: ProfileKind, step_minutes: u32, start: Option<NaiveDateTime>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation(format!("{kind:?} profile has no samples")));
        }
        if step_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(step_minutes) {
            return Err(Error::Validation(format!("step of {step_minutes} min does not divide a day")));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{kind:?} sample {k} is not finite")));
            }
            if v < 0.0 && !kind.allows_negative() {
                return Err(Error::Validation(format!("{kind:?} sample {k} is negative ({v})")));
            }
        }
        Ok(Profile { kind, step_minutes, start, values })
    }

    /// A representative day; the step is inferred from the sample count.
    pub fn daily(kind: ProfileKind, values: Vec<f64>) -> Result<Self> {
        let n = values.len() as u32;
        if n == 0 || !MINUTES_PER_DAY.is_multiple_of(n) {
            return Err(Error::Validation(format!("{n} samples do not tile a day")));
        }
        Profile::new(kind, MINUTES_PER_DAY / n, None, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn slots_per_day(&self) -> usize {
        (MINUTES_PER_DAY / self.step_minutes) as usize
    }

    pub fn step_hours(&self) -> f64 {
        self.step_minutes as f64 / 60.0
    }

    /// `Σ value · step` in MWh (or $·h/MWh for prices).
    pub fn energy(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step_hours()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Splits a series that starts at midnight into whole calendar days.
    pub fn days(&self) -> Result<Vec<(NaiveDate, Profile)>> {
        let start = self
            .start
            .ok_or_else(|| Error::Validation("series has no start timestamp".into()))?;
        if start.time() != NaiveTime::MIN {
            return Err(Error::Validation(format!("series starts at {start}, not at midnight")));
        }
        let spd = self.slots_per_day();
        if !self.values.len().is_multiple_of(spd) {
            return Err(Error::Validation(format!(
                "{} samples are not a whole number of {spd}-slot days",
                self.values.len()
            )));
        }
        Ok(self
            .values
            .chunks(spd)
            .enumerate()
            .map(|(k, chunk)| {
                let date = start.date() + Duration::days(k as i64);
                let day = Profile { kind: self.kind, step_minutes: self.step_minutes, start: None, values: chunk.to_vec() };
                (date, day)
            })
            .collect())
    }

    pub fn scaled(&self, factor: f64) -> Profile {
        Profile { values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }
}

/// Header names of the timestamp and value columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub timestamp: String,
    pub value: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap { timestamp: "timestamp".into(), value: "value".into() }
    }
}

/// Reads a `timestamp,value` CSV. Timestamps must be strictly increasing and
/// uniformly spaced; the step is inferred from the first two rows.
pub fn load_timeseries(path: &Path, columns: &ColumnMap, kind: ProfileKind) -> Result<Profile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_timeseries(&text, &path.display().to_string(), columns, kind)
}

pub fn parse_timeseries(text: &str, source_name: &str, columns: &ColumnMap, kind: ProfileKind) -> Result<Profile> {
    let schema = |message: String| Error::Schema { source_name: source_name.to_string(), message };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| schema(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| schema(format!("missing column `{name}`")))
    };
    let ts_col = find(&columns.timestamp)?;
    let val_col = find(&columns.value)?;

    let mut stamps: Vec<NaiveDateTime> = Vec::new();
    let mut values = Vec::new();
    for (k, record) in reader.records().enumerate() {
        // Row numbers are 1-based file lines; the header is line 1.
        let row = k + 2;
        let parse_err = |message: String| Error::Parse { source_name: source_name.to_string(), row, message };
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let ts = record.get(ts_col).ok_or_else(|| parse_err("missing timestamp".into()))?;
        let ts = NaiveDateTime::parse_from_str(ts, TIMESTAMP_FORMAT)
            .map_err(|e| parse_err(format!("bad timestamp `{ts}`: {e}")))?;
        let v = record.get(val_col).ok_or_else(|| parse_err("missing value".into()))?;
        let v: f64 = v.parse().map_err(|_| parse_err(format!("bad value `{v}`")))?;
        if !v.is_finite() {
            return Err(parse_err(format!("non-finite value `{v}`")));
        }
        if v < 0.0 && !kind.allows_negative() {
            return Err(Error::Validation(format!("{source_name}: row {row}: negative {kind:?} value {v}")));
        }
        if let Some(&prev) = stamps.last() {
            let gap = (ts - prev).num_minutes();
            if gap <= 0 {
                return Err(Error::Schema {
                    source_name: source_name.to_string(),
                    message: format!("row {row}: timestamp {ts} does not increase"),
                });
            }
            if stamps.len() >= 2 {
                let step = (stamps[1] - stamps[0]).num_minutes();
                if gap != step {
                    return Err(Error::Schema {
                        source_name: source_name.to_string(),
                        message: format!("row {row}: spacing of {gap} min breaks the {step} min step"),
                    });
                }
            }
        }
        stamps.push(ts);
        values.push(v);
    }
    if stamps.len() < 2 {
        return Err(schema("need at least two rows to infer the step".into()));
    }
    let step = (stamps[1] - stamps[0]).num_minutes();
    if step <= 0 || MINUTES_PER_DAY as i64 % step != 0 {
        return Err(schema(format!("step of {step} min does not divide a day")));
    }
    Profile::new(kind, step as u32, Some(stamps[0]), values)
}

pub fn write_timeseries(path: &Path, profile: &Profile) -> Result<()> {
    let text = format_timeseries(profile)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn format_timeseries(profile: &Profile) -> Result<String> {
    let start = profile
        .start
        .ok_or_else(|| Error::Validation("cannot write a series without a start timestamp".into()))?;
    let mut out = String::with_capacity(profile.len() * 32);
    out.push_str("timestamp,value\n");
    let step = Duration::minutes(profile.step_minutes as i64);
    let mut t = start;
    for v in &profile.values {
        // `{:?}` is the shortest round-trip representation.
        out.push_str(&format!("{},{:?}\n", t.format(TIMESTAMP_FORMAT), v));
        t += step;
    }
    Ok(out)
}

/// Changes the sampling step. Upsampling holds each value; downsampling
/// averages consecutive samples. Both preserve `Σ value · step`.
pub fn resample(p: &Profile, target_step: u32) -> Result<Profile> {
    let from = p.step_minutes;
    let err = Error::Resample { from, to: target_step };
    if target_step == 0 || !MINUTES_PER_DAY.is_multiple_of(target_step) {
        return Err(err);
    }
    let values = if target_step == from {
        p.values.clone()
    } else if from.is_multiple_of(target_step) {
        let k = (from / target_step) as usize;
        p.values.iter().flat_map(|&v| std::iter::repeat_n(v, k)).collect()
    } else if target_step.is_multiple_of(from) {
        let k = (target_step / from) as usize;
        if !p.values.len().is_multiple_of(k) {
            return Err(err);
        }
        p.values.chunks(k).map(|c| c.iter().sum::<f64>() / k as f64).collect()
    } else {
        return Err(err);
    };
    Ok(Profile { kind: p.kind, step_minutes: target_step, start: p.start, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DayType {
    SWD,
    SED,
    NSWD,
    NSED,
}

impl DayType {
    /// Table order: summer weekday, summer weekend, non-summer weekday,
    /// non-summer weekend.
    pub const ALL: [DayType; 4] = [DayType::SWD, DayType::SED, DayType::NSWD, DayType::NSED];

    pub fn from_flags(summer: bool, weekend: bool) -> Self {
        match (summer, weekend) {
            (true, false) => DayType::SWD,
            (true, true) => DayType::SED,
            (false, false) => DayType::NSWD,
            (false, true) => DayType::NSED,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DayType::SWD => "SWD",
            DayType::SED => "SED",
            DayType::NSWD => "NSWD",
            DayType::NSED => "NSED",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DayType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DayType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DayType::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown day type `{s}`")))
    }
}

/// One value per [`DayType`], serialized as `{"SWD": .., "SED": .., "NSWD": .., "NSED": ..}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DayTypeMap<T> {
    #[serde(rename = "SWD")]
    pub swd: T,
    #[serde(rename = "SED")]
    pub sed: T,
    #[serde(rename = "NSWD")]
    pub nswd: T,
    #[serde(rename = "NSED")]
    pub nsed: T,
}

impl<T> DayTypeMap<T> {
    pub fn from_fn(mut f: impl FnMut(DayType) -> T) -> Self {
        DayTypeMap { swd: f(DayType::SWD), sed: f(DayType::SED), nswd: f(DayType::NSWD), nsed: f(DayType::NSED) }
    }

    pub fn get(&self, d: DayType) -> &T {
        match d {
            DayType::SWD => &self.swd,
            DayType::SED => &self.sed,
            DayType::NSWD => &self.nswd,
            DayType::NSED => &self.nsed,
        }
    }

    pub fn get_mut(&mut self, d: DayType) -> &mut T {
        match d {
            DayType::SWD => &mut self.swd,
            DayType::SED => &mut self.sed,
            DayType::NSWD => &mut self.nswd,
            DayType::NSED => &mut self.nsed,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (DayType, &T)> {
        DayType::ALL.into_iter().map(move |d| (d, self.get(d)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(DayType, &T) -> U) -> DayTypeMap<U> {
        DayTypeMap::from_fn(|d| f(d, self.get(d)))
    }

    pub fn try_map<U>(&self, mut f: impl FnMut(DayType, &T) -> Result<U>) -> Result<DayTypeMap<U>> {
        Ok(DayTypeMap { swd: f(DayType::SWD, &self.swd)?, sed: f(DayType::SED, &self.sed)?, nswd: f(DayType::NSWD, &self.nswd)?, nsed: f(DayType::NSED, &self.nsed)? })
    }
}

/// Month and day without a year, written `MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonthDay {
    pub month: u32,
    pub day: u32,
}

impl MonthDay {
    pub fn new(month: u32, day: u32) -> Result<Self> {
        // 2000 is a leap year, so Feb 29 is accepted.
        NaiveDate::from_ymd_opt(2000, month, day)
            .map(|_| MonthDay { month, day })
            .ok_or_else(|| Error::Config(format!("invalid month-day {month:02}-{day:02}")))
    }

    fn of(date: NaiveDate) -> Self {
        MonthDay { month: date.month(), day: date.day() }
    }
}

impl FromStr for MonthDay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected MM-DD, got `{s}`"));
        let (m, d) = s.split_once('-').ok_or_else(bad)?;
        MonthDay::new(m.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    }
}

impl fmt::Display for MonthDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}-{:02}", self.month, self.day)
    }
}

impl Serialize for MonthDay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthDay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod weekday_names {
    use chrono::Weekday;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(days: &[Weekday], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(days.iter().map(|d| d.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Weekday>, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        names
            .iter()
            .map(|n| n.parse::<Weekday>().map_err(|_| serde::de::Error::custom(format!("unknown weekday `{n}`"))))
            .collect()
    }
}

/// Summer window (inclusive, may wrap past new year) and weekend days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalendarRule {
    pub summer_start: MonthDay,
    pub summer_end: MonthDay,
    #[serde(with = "weekday_names")]
    pub weekend_days: Vec<Weekday>,
}

impl Default for CalendarRule {
    fn default() -> Self {
        CalendarRule {
            summer_start: MonthDay { month: 5, day: 1 },
            summer_end: MonthDay { month: 10, day: 31 },
            weekend_days: vec![Weekday::Sat, Weekday::Sun],
        }
    }
}

impl CalendarRule {
    pub fn validate(&self) -> Result<()> {
        MonthDay::new(self.summer_start.month, self.summer_start.day)?;
        MonthDay::new(self.summer_end.month, self.summer_end.day)?;
        let mut days = self.weekend_days.clone();
        days.sort_by_key(|d| d.num_days_from_monday());
        days.dedup();
        if days.is_empty() || days.len() >= 7 {
            return Err(Error::Config("weekend days must be a non-empty proper subset of the week".into()));
        }
        Ok(())
    }

    pub fn is_summer(&self, date: NaiveDate) -> bool {
        let md = MonthDay::of(date);
        if self.summer_start <= self.summer_end {
            self.summer_start <= md && md <= self.summer_end
        } else {
            md >= self.summer_start || md <= self.summer_end
        }
    }

    pub fn is_weekend(&self, date: NaiveDate) -> bool {
        self.weekend_days.contains(&date.weekday())
    }
}

pub fn classify_day(date: NaiveDate, rule: &CalendarRule) -> DayType {
    DayType::from_flags(rule.is_summer(date), rule.is_weekend(date))
}

pub fn day_counts(year: i32, rule: &CalendarRule) -> DayTypeMap<u32> {
    let mut counts = DayTypeMap::<u32>::default();
    let mut date = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
    while date.year() == year {
        *counts.get_mut(classify_day(date, rule)) += 1;
        date = date.succ_opt().expect("date in range");
    }
    counts
}
