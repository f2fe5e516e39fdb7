//! Battery purchase-price trajectories and case labels such as `a-3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const START_PRICE_RANGE: (f64, f64) = (117.0, 175.5);
pub const CASES_PER_CATEGORY: usize = 10;
/// Category a reaches this price in [`CONVERGENCE_YEAR`] and stays there.
pub const FLOOR_PRICE: f64 = 100.0;
pub const CONVERGENCE_YEAR: usize = 15;
/// Category b loses this fraction every year.
pub const ANNUAL_DECAY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Linear descent to the floor price.
    A,
    /// Constant-rate decay.
    B,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::A => "a",
            Category::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CaseId {
    pub category: Category,
    /// 1-based.
    pub case: usize,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.category, self.case)
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad price case `{s}` (expected a-1..a-{CASES_PER_CATEGORY} or b-1..b-{CASES_PER_CATEGORY})"));
        let (cat, num) = s.trim().split_once('-').ok_or_else(bad)?;
        let category = match cat {
            "a" => Category::A,
            "b" => Category::B,
            _ => return Err(bad()),
        };
        let case: usize = num.parse().map_err(|_| bad())?;
        if !(1..=CASES_PER_CATEGORY).contains(&case) {
            return Err(bad());
        }
        Ok(CaseId { category, case })
    }
}

/// Parses `a-1..a-10,b-3` style lists. Ranges stay within one category;
/// the result keeps first-mention order without duplicates.
pub fn parse_cases(list: &str) -> Result<Vec<CaseId>> {
    let mut out: Vec<CaseId> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let ids = match item.split_once("..") {
            Some((from, to)) => {
                let (from, to): (CaseId, CaseId) = (from.parse()?, to.parse()?);
                if from.category != to.category || from.case > to.case {
                    return Err(Error::Config(format!("bad case range `{item}`")));
                }
                (from.case..=to.case).map(|case| CaseId { category: from.category, case }).collect()
            }
            None => vec![item.parse()?],
        };
        for id in ids {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty price-case list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePath {
    pub label: String,
    /// $/kWh for plan years 1..=Y.
    pub cost_per_kwh: Vec<f64>,
}

impl PricePath {
    pub fn constant(label: &str, price: f64, horizon: usize) -> Self {
        PricePath { label: label.to_string(), cost_per_kwh: vec![price; horizon] }
    }

    pub fn scaled(&self, k: f64) -> Self {
        PricePath { label: format!("{}x{k}", self.label), cost_per_kwh: self.cost_per_kwh.iter().map(|c| c * k).collect() }
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        if self.cost_per_kwh.len() < horizon {
            return Err(Error::Config(format!(
                "price path {} has {} years, horizon is {horizon}",
                self.label,
                self.cost_per_kwh.len()
            )));
        }
        if self.cost_per_kwh.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Config(format!("price path {} has a negative or non-finite entry", self.label)));
        }
        Ok(())
    }
}

/// Starting price of case `k` (1-based): evenly spaced over the range.
pub fn start_price(k: usize) -> f64 {
    let (lo, hi) = START_PRICE_RANGE;
    lo + (k - 1) as f64 * (hi - lo) / (CASES_PER_CATEGORY - 1) as f64
}

pub fn price_path(id: CaseId, horizon: usize) -> PricePath {
    let p0 = start_price(id.case);
    let cost_per_kwh = (1..=horizon)
        .map(|y| match id.category {
            Category::A => {
                let t = ((y - 1) as f64 / (CONVERGENCE_YEAR - 1) as f64).min(1.0);
                p0 + (FLOOR_PRICE - p0) * t
            }
            Category::B => p0 * (1.0 - ANNUAL_DECAY).powi(y as i32 - 1),
        })
        .collect();
    PricePath { label: id.to_string(), cost_per_kwh }
}

/// All cases of one category.
pub fn price_paths(category: Category, horizon: usize) -> Vec<PricePath> {
    (1..=CASES_PER_CATEGORY).map(|case| price_path(CaseId { category, case }, horizon)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let a1 = price_path("a-1".parse().unwrap(), 15);
        assert_eq!(a1.cost_per_kwh[0], 117.0);
        assert!((a1.cost_per_kwh[14] - 100.0).abs() < 1e-12);
        let b1 = price_path("b-1".parse().unwrap(), 2);
        assert!((b1.cost_per_kwh[1] - 115.83).abs() < 1e-12);
        assert!((start_price(10) - 175.5).abs() < 1e-12);
        for k in 1..10 {
            assert!((start_price(k + 1) - start_price(k) - 6.5).abs() < 1e-12);
        }
    }

    #[test]
    fn category_a_holds_after_convergence() {
        let p = price_path("a-10".parse().unwrap(), 20);
        assert!(p.cost_per_kwh[14..].iter().all(|&c| (c - 100.0).abs() < 1e-12));
    }

    #[test]
    fn case_lists() {
        let all = parse_cases("a-1..a-10,b-1..b-10").unwrap();
        assert_eq!(all.len(), 20);
        assert_eq!(all[10].to_string(), "b-1");
        assert_eq!(parse_cases("b-2, a-1, b-2").unwrap().len(), 2);
        assert!(parse_cases("a-1..b-3").is_err());
        assert!(parse_cases("c-1").is_err());
        assert!(parse_cases("a-11").is_err());
        assert!(parse_cases("").is_err());
    }
}
