//! Constraint audit of a decoded plan, independent of the LP formulation.
//!
//! Capacity is recomputed from the installs, loads and solar from the
//! scenario data, and the SOC trajectory is re-walked from the reported
//! initial state.

use serde::Serialize;

use super::costs::capacity_schedule;
use super::{PlanProblem, PlanSolution};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AuditReport {
    /// `solar − curtailed + discharge − charge + purchase − load`, MW.
    pub balance_residual: f64,
    /// Distance outside `[ρ_min, ρ_max]·capacity`, MWh.
    pub soc_violation: f64,
    /// `|E_t − E_{t−1} − (η_c·c − d/η_d)·Δt|`, MWh.
    pub recursion_residual: f64,
    /// `|E_end − E_start|`, MWh.
    pub reset_residual: f64,
    /// Distance outside the grid-connection limits, MW.
    pub purchase_violation: f64,
    /// Charge or discharge outside `[0, r·capacity]`, MW.
    pub power_violation: f64,
    /// Curtailment outside `[0, available solar]`, MW.
    pub curtailment_violation: f64,
    /// Reported capacity vs the install window, MWh.
    pub capacity_mismatch: f64,
    pub negative_installs: f64,
}

impl AuditReport {
    pub fn violations(&self, tol: f64) -> Vec<String> {
        [
            ("balance residual", self.balance_residual),
            ("SOC bound violation", self.soc_violation),
            ("SOC recursion residual", self.recursion_residual),
            ("daily reset residual", self.reset_residual),
            ("purchase bound violation", self.purchase_violation),
            ("power bound violation", self.power_violation),
            ("curtailment bound violation", self.curtailment_violation),
            ("capacity mismatch", self.capacity_mismatch),
            ("negative install", self.negative_installs),
        ]
        .iter()
        .filter(|(_, v)| !(*v <= tol))
        .map(|(name, v)| format!("{name} {v:.3e} exceeds {tol:.0e}"))
        .collect()
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.violations(tol).is_empty()
    }
}

fn outside(v: f64, lo: f64, hi: f64) -> f64 {
    (lo - v).max(v - hi).max(0.0)
}

pub fn audit(problem: &PlanProblem, sol: &PlanSolution) -> AuditReport {
    let b = &problem.battery;
    let dt = problem.scenarios.step_hours();
    let y_end = problem.horizon();
    let mut rep = AuditReport::default();
    let worst = |field: &mut f64, v: f64| {
        if !(v <= *field) {
            *field = v;
        }
    };

    for u in &sol.installs {
        worst(&mut rep.negative_installs, -u);
    }
    let installed = capacity_schedule(&sol.installs, b.life_years, y_end);
    let p_lo = if problem.allow_export { -problem.congestion_limit_mw } else { 0.0 };
    for y in 1..=y_end {
        let cap = installed[y - 1] + problem.existing_capacity_mwh;
        worst(&mut rep.capacity_mismatch, (cap - sol.capacity.get(y - 1).copied().unwrap_or(f64::NAN)).abs());
        for (k, d) in sol.dispatch[y - 1].iter().enumerate() {
            let day = problem.scenarios.day(y, k);
            let mut prev = d.initial_soc;
            worst(&mut rep.soc_violation, outside(prev, b.soc_min_frac * cap, b.soc_max_frac * cap));
            for t in 0..d.soc.len() {
                let avail = day.micro_solar.values[t];
                let load = day.micro_demand.values[t] - problem.gas_turbine_mw;
                let (c, dis, p, q, e) = (d.charge[t], d.discharge[t], d.purchase[t], d.curtailed[t], d.soc[t]);
                worst(&mut rep.balance_residual, (avail - q + dis - c + p - load).abs());
                worst(&mut rep.curtailment_violation, outside(q, 0.0, avail));
                worst(&mut rep.purchase_violation, outside(p, p_lo, problem.congestion_limit_mw));
                let pmax = b.power_energy_ratio * cap;
                worst(&mut rep.power_violation, outside(c, 0.0, pmax).max(outside(dis, 0.0, pmax)));
                worst(&mut rep.soc_violation, outside(e, b.soc_min_frac * cap, b.soc_max_frac * cap));
                let expected = prev + (b.charge_efficiency * c - dis / b.discharge_efficiency) * dt;
                worst(&mut rep.recursion_residual, (e - expected).abs());
                prev = e;
            }
            worst(&mut rep.reset_residual, (prev - d.initial_soc).abs());
        }
    }
    rep
}
