//! Net demand and the affine market-clearing-price model `λ = α·P_net + β`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{DayType, DayTypeMap, Profile, ProfileKind};

/// Market-wide demand and renewable output over the same time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub demand: Profile,
    pub solar: Profile,
    pub wind: Profile,
}

fn check_aligned(what: &str, profiles: &[&Profile]) -> Result<()> {
    let first = profiles[0];
    for p in &profiles[1..] {
        if p.len() != first.len() || p.step_minutes != first.step_minutes {
            return Err(Error::Alignment(format!(
                "{what}: {} samples at {} min vs {} samples at {} min",
                first.len(),
                first.step_minutes,
                p.len(),
                p.step_minutes
            )));
        }
    }
    Ok(())
}

/// Demand minus solar minus wind, sample by sample.
pub fn net_demand(state: &MarketState) -> Result<Profile> {
    check_aligned("net demand", &[&state.demand, &state.solar, &state.wind])?;
    let values = state
        .demand
        .values
        .iter()
        .zip(&state.solar.values)
        .zip(&state.wind.values)
        .map(|((d, s), w)| d - s - w)
        .collect();
    Ok(Profile { kind: ProfileKind::Net, step_minutes: state.demand.step_minutes, start: state.demand.start, values })
}

/// Grid purchase needed by the microgrid: demand − renewable − battery
/// injection, with the battery discharge-positive.
pub fn microgrid_net(demand: &Profile, battery_net_injection: &Profile, renewable: &Profile) -> Result<Profile> {
    check_aligned("microgrid net", &[demand, battery_net_injection, renewable])?;
    let values = demand
        .values
        .iter()
        .zip(&battery_net_injection.values)
        .zip(&renewable.values)
        .map(|((d, b), r)| d - r - b)
        .collect();
    Ok(Profile { kind: ProfileKind::Net, step_minutes: demand.step_minutes, start: demand.start, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceFit {
    /// $/MWh per MW of net demand.
    pub alpha: f64,
    /// $/MWh.
    pub beta: f64,
    pub rmse: f64,
}

impl PriceFit {
    pub fn price(&self, net_mw: f64) -> f64 {
        self.alpha * net_mw + self.beta
    }
}

/// Ordinary least squares fit of price on net demand for one day type.
///
/// Points are sorted before summation so the coefficients do not depend on
/// the input order.
pub fn fit_price(points: &[(f64, f64)], cluster: DayType) -> Result<PriceFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("{cluster}: need at least 2 points, got {}", points.len())));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit(format!("{cluster}: non-finite data point")));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if pts.first().map(|p| p.0) == pts.last().map(|p| p.0) {
        return Err(Error::Fit(format!("{cluster}: all net-demand values are equal, slope is undetermined")));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let beta = my - alpha * mx;
    if alpha < 0.0 {
        return Err(Error::Fit(format!(
            "{cluster}: fitted slope α = {alpha:.6} < 0 (β = {beta:.3}); price must not fall as net demand rises"
        )));
    }
    let sse: f64 = pts.iter().map(|p| (p.1 - alpha * p.0 - beta).powi(2)).sum();
    Ok(PriceFit { alpha, beta, rmse: (sse / n).sqrt() })
}

/// Per-day-type price coefficients, optionally overridden for given plan
/// years. Serialized as `{"SWD": {"alpha", "beta", "rmse"}, ...}` with an
/// optional `"years"` map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceModel {
    #[serde(flatten)]
    pub base: DayTypeMap<PriceFit>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub years: BTreeMap<usize, DayTypeMap<PriceFit>>,
}

impl PriceModel {
    pub fn constant(base: DayTypeMap<PriceFit>) -> Self {
        PriceModel { base, years: BTreeMap::new() }
    }

    /// Coefficients in force for plan year `year` (1-based).
    pub fn fit(&self, year: usize, cluster: DayType) -> &PriceFit {
        self.years.get(&year).unwrap_or(&self.base).get(cluster)
    }

    pub fn validate(&self) -> Result<()> {
        let all = std::iter::once(&self.base).chain(self.years.values());
        for m in all {
            for (d, f) in m.iter() {
                if !(f.alpha.is_finite() && f.beta.is_finite()) || f.alpha < 0.0 {
                    return Err(Error::Model(format!("{d}: invalid price coefficients α = {}, β = {}", f.alpha, f.beta)));
                }
            }
        }
        Ok(())
    }
}

/// `α·net + β` elementwise with the plan-year-1 coefficients.
pub fn eval_price(model: &PriceModel, cluster: DayType, net: &Profile) -> Profile {
    eval_price_in_year(model, 1, cluster, net)
}

pub fn eval_price_in_year(model: &PriceModel, year: usize, cluster: DayType, net: &Profile) -> Profile {
    let f = model.fit(year, cluster);
    Profile {
        kind: ProfileKind::Price,
        step_minutes: net.step_minutes,
        start: net.start,
        values: net.values.iter().map(|&x| f.price(x)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(kind: ProfileKind, v: Vec<f64>) -> Profile {
        Profile { kind, step_minutes: 360, start: None, values: v }
    }

    #[test]
    fn net_demand_may_go_negative() {
        let s = MarketState {
            demand: p(ProfileKind::Demand, vec![100.0, 10.0]),
            solar: p(ProfileKind::Solar, vec![20.0, 20.0]),
            wind: p(ProfileKind::Wind, vec![10.0, 5.0]),
        };
        assert_eq!(net_demand(&s).unwrap().values, vec![70.0, -15.0]);
    }

    #[test]
    fn misaligned_profiles_are_rejected() {
        let s = MarketState {
            demand: p(ProfileKind::Demand, vec![1.0, 2.0]),
            solar: p(ProfileKind::Solar, vec![1.0]),
            wind: p(ProfileKind::Wind, vec![1.0, 2.0]),
        };
        assert!(matches!(net_demand(&s), Err(Error::Alignment(_))));
    }

    #[test]
    fn microgrid_purchase_sign_convention() {
        let d = p(ProfileKind::Demand, vec![40.0, 40.0, 40.0]);
        let b = p(ProfileKind::Net, vec![5.0, -5.0, 0.0]);
        let re = p(ProfileKind::Solar, vec![10.0; 3]);
        assert_eq!(microgrid_net(&d, &b, &re).unwrap().values, vec![25.0, 35.0, 30.0]);
    }

    #[test]
    fn exact_line_and_rejections() {
        let f = fit_price(&[(10.0, 20.0), (20.0, 30.0)], DayType::SWD).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-15 && (f.beta - 10.0).abs() < 1e-12 && f.rmse < 1e-12);
        assert!(matches!(fit_price(&[(5.0, 7.0), (5.0, 9.0)], DayType::SWD), Err(Error::Fit(_))));
        let err = fit_price(&[(1.0, 9.0), (2.0, 7.0)], DayType::NSED).unwrap_err();
        assert!(err.to_string().contains("NSED"));
    }

    #[test]
    fn eval_examples() {
        let fit = PriceFit { alpha: 0.002, beta: 5.0, rmse: 0.0 };
        let model = PriceModel::constant(DayTypeMap::from_fn(|_| fit));
        let net = p(ProfileKind::Net, vec![-3000.0, 20.0]);
        let out = eval_price(&model, DayType::SED, &net);
        assert!((out.values[0] + 1.0).abs() < 1e-12);
        assert!((out.values[1] - 5.04).abs() < 1e-12);
    }

    #[test]
    fn json_layout() {
        let fit = PriceFit { alpha: 1.0, beta: 2.0, rmse: 0.5 };
        let model = PriceModel::constant(DayTypeMap::from_fn(|_| fit));
        let v = serde_json::to_value(&model).unwrap();
        assert_eq!(v["SWD"], serde_json::json!({"alpha": 1.0, "beta": 2.0, "rmse": 0.5}));
        assert!(v.get("years").is_none());
        let back: PriceModel = serde_json::from_value(v).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn per_year_override() {
        let base = PriceFit { alpha: 1.0, beta: 0.0, rmse: 0.0 };
        let later = PriceFit { alpha: 2.0, beta: 0.0, rmse: 0.0 };
        let mut model = PriceModel::constant(DayTypeMap::from_fn(|_| base));
        model.years.insert(3, DayTypeMap::from_fn(|_| later));
        assert_eq!(model.fit(2, DayType::SWD).alpha, 1.0);
        assert_eq!(model.fit(3, DayType::SWD).alpha, 2.0);
    }
}
