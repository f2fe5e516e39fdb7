//! Capacity windows, discounting and straight-line salvage.

/// `v_y = (1 − γ)^y` for plan year `y` (1-based).
pub fn discount_factor(gamma: f64, year: usize) -> f64 {
    (1.0 - gamma).powi(year as i32)
}

/// Capacity in service each year: installs from the last `life` years,
/// the install year included.
pub fn capacity_schedule(installs: &[f64], life: usize, horizon: usize) -> Vec<f64> {
    (1..=horizon)
        .map(|y| {
            let from = y.saturating_sub(life) + 1;
            (from..=y).filter_map(|k| installs.get(k - 1)).sum()
        })
        .collect()
}

/// Plan years (1-based) whose installs are in service in year `y`.
pub fn life_window(y: usize, life: usize) -> std::ops::RangeInclusive<usize> {
    (y.saturating_sub(life) + 1)..=y
}

/// Fraction of the purchase price left at the end of year `horizon` for
/// capacity bought in year `y`.
pub fn salvage_fraction(y: usize, life: usize, horizon: usize) -> f64 {
    let used = (horizon + 1).saturating_sub(y);
    life.saturating_sub(used) as f64 / life as f64
}

/// Undiscounted residual value in $ of all installs at the end of the horizon.
pub fn salvage_undiscounted(installs: &[f64], cost_per_kwh: &[f64], life: usize, horizon: usize) -> f64 {
    installs
        .iter()
        .zip(cost_per_kwh)
        .take(horizon)
        .enumerate()
        .map(|(k, (u, c))| c * u * 1000.0 * salvage_fraction(k + 1, life, horizon))
        .sum()
}

/// Residual value discounted with `v_Y`.
pub fn salvage_value(installs: &[f64], cost_per_kwh: &[f64], life: usize, horizon: usize, gamma: f64) -> f64 {
    discount_factor(gamma, horizon) * salvage_undiscounted(installs, cost_per_kwh, life, horizon)
}
