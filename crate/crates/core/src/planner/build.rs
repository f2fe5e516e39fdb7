//! Assembly of the multi-year stochastic plan LP.
//!
//! Layout: the first `Y` variables are the yearly installs `u_y`. Then one
//! block per (year, scenario) holds the capacity copy `k` followed by nine
//! variables per slot. Each block's rows are the capacity link, an optional
//! fixed-initial-SOC row, and six rows per slot.

use sparse_simplex::{Bounds, LpBuilder, LpInstance};

use super::costs::{discount_factor, life_window, salvage_fraction};
use super::{InitialSoc, PlanProblem};
use crate::error::{Error, Result};

/// Per-slot variables, in block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotVar {
    Charge,
    Discharge,
    Purchase,
    /// State of charge at the end of the slot.
    Soc,
    Curtail,
    ChargeSlack,
    DischargeSlack,
    SocMinSlack,
    SocMaxSlack,
}

pub const SLOT_VARS: usize = 9;

/// Per-slot rows, in block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRow {
    Balance,
    Recursion,
    ChargeLimit,
    DischargeLimit,
    SocMin,
    SocMax,
}

pub const SLOT_ROWS: usize = 6;

const SLOT_ROW_ORDER: [SlotRow; SLOT_ROWS] =
    [SlotRow::Balance, SlotRow::Recursion, SlotRow::ChargeLimit, SlotRow::DischargeLimit, SlotRow::SocMin, SlotRow::SocMax];

/// What a row means, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    CapacityLink,
    InitialSoc,
    Slot(SlotRow, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanLayout {
    pub horizon: usize,
    pub scenarios: usize,
    pub slots: usize,
    pub fixed_initial: bool,
}

impl PlanLayout {
    fn block_vars(&self) -> usize {
        1 + self.slots * SLOT_VARS
    }

    fn block_rows(&self) -> usize {
        1 + usize::from(self.fixed_initial) + self.slots * SLOT_ROWS
    }

    fn block(&self, year: usize, k: usize) -> usize {
        (year - 1) * self.scenarios + k
    }

    pub fn n_vars(&self) -> usize {
        self.horizon + self.horizon * self.scenarios * self.block_vars()
    }

    pub fn n_rows(&self) -> usize {
        self.horizon * self.scenarios * self.block_rows()
    }

    /// Install variable of plan year `year` (1-based).
    pub fn install(&self, year: usize) -> usize {
        year - 1
    }

    pub fn capacity(&self, year: usize, k: usize) -> usize {
        self.horizon + self.block(year, k) * self.block_vars()
    }

    pub fn var(&self, year: usize, k: usize, t: usize, v: SlotVar) -> usize {
        self.capacity(year, k) + 1 + t * SLOT_VARS + v as usize
    }

    fn first_row(&self, year: usize, k: usize) -> usize {
        self.block(year, k) * self.block_rows()
    }

    pub fn row(&self, year: usize, k: usize, t: usize, r: SlotRow) -> usize {
        self.first_row(year, k) + 1 + usize::from(self.fixed_initial) + t * SLOT_ROWS + r as usize
    }

    /// `(year, scenario index, kind)` of a row.
    pub fn describe(&self, row: usize) -> (usize, usize, RowKind) {
        let block = row / self.block_rows();
        let (year, k) = (block / self.scenarios + 1, block % self.scenarios);
        let mut off = row % self.block_rows();
        if off == 0 {
            return (year, k, RowKind::CapacityLink);
        }
        off -= 1;
        if self.fixed_initial {
            if off == 0 {
                return (year, k, RowKind::InitialSoc);
            }
            off -= 1;
        }
        (year, k, RowKind::Slot(SLOT_ROW_ORDER[off % SLOT_ROWS], off / SLOT_ROWS))
    }
}

/// Variant of the plan LP to assemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// When false, installs are fixed at zero and the pre-installed capacity
    /// is dropped: the no-battery baseline.
    pub allow_investment: bool,
}

/// Per-slot load seen by the grid connection: microgrid demand less the
/// gas-turbine output.
pub fn net_load(problem: &PlanProblem, year: usize, k: usize) -> Vec<f64> {
    problem.scenarios.day(year, k).micro_demand.values.iter().map(|d| d - problem.gas_turbine_mw).collect()
}

/// Weight of `λ·p` in the objective: `v_y · days · Pr_i · Δt`.
pub fn energy_weight(problem: &PlanProblem, year: usize, k: usize) -> f64 {
    discount_factor(problem.discount_rate, year)
        * problem.annualization_days
        * problem.scenarios.scenarios[k].probability
        * problem.scenarios.step_hours()
}

/// Objective coefficient of `u_y`: discounted purchase less discounted
/// salvage, per MWh.
pub fn install_cost(problem: &PlanProblem, year: usize) -> f64 {
    let y_end = problem.horizon();
    let life = problem.battery.life_years;
    let c = problem.price_path.cost_per_kwh[year - 1] * 1000.0;
    c * (discount_factor(problem.discount_rate, year)
        - discount_factor(problem.discount_rate, y_end) * salvage_fraction(year, life, y_end))
}

/// Builds the LP. `prices[y-1][k][t]` replaces the scenario price profiles
/// when given.
pub fn build_plan_lp(
    problem: &PlanProblem,
    options: BuildOptions,
    prices: Option<&[Vec<Vec<f64>>]>,
) -> Result<(LpInstance, PlanLayout)> {
    let set = &problem.scenarios;
    let layout = PlanLayout {
        horizon: problem.horizon(),
        scenarios: set.scenarios.len(),
        slots: set.slots(),
        fixed_initial: matches!(problem.battery.initial_soc, InitialSoc::Fixed(_)),
    };
    let (y_end, n_scen, slots) = (layout.horizon, layout.scenarios, layout.slots);
    if let Some(p) = prices {
        if p.len() != y_end || p.iter().any(|y| y.len() != n_scen || y.iter().any(|d| d.len() != slots)) {
            return Err(Error::Model("price override does not cover every (year, scenario, slot)".into()));
        }
    }
    let b = &problem.battery;
    let dt = set.step_hours();
    let existing = if options.allow_investment { problem.existing_capacity_mwh } else { 0.0 };
    let p_lo = if problem.allow_export { -problem.congestion_limit_mw } else { 0.0 };
    let p_bounds = Bounds::new(p_lo, problem.congestion_limit_mw);

    let mut lp = LpBuilder::with_capacity(layout.n_vars(), layout.n_rows(), layout.n_rows() * 3 + y_end * n_scen * 10);
    for y in 1..=y_end {
        let bounds = if options.allow_investment { Bounds::NON_NEGATIVE } else { Bounds::fixed(0.0) };
        lp.add_var(bounds, install_cost(problem, y));
    }
    for y in 1..=y_end {
        for k in 0..n_scen {
            let day = set.day(y, k);
            let load = net_load(problem, y, k);
            let w = energy_weight(problem, y, k);
            let lam: &[f64] = match prices {
                Some(p) => &p[y - 1][k],
                None => &day.price.values,
            };
            let cap = lp.add_var(Bounds::NON_NEGATIVE, 0.0);
            debug_assert_eq!(cap, layout.capacity(y, k));
            for t in 0..slots {
                let re = day.micro_solar.values[t];
                lp.add_var(Bounds::NON_NEGATIVE, 0.0); // charge
                lp.add_var(Bounds::NON_NEGATIVE, 0.0); // discharge
                lp.add_var(p_bounds, w * lam[t]); // purchase
                lp.add_var(Bounds::NON_NEGATIVE, 0.0); // soc
                lp.add_var(Bounds::new(0.0, re), 0.0); // curtailment
                for _ in 0..4 {
                    lp.add_var(Bounds::NON_NEGATIVE, 0.0);
                }
            }

            let mut link: Vec<(usize, f64)> = vec![(cap, 1.0)];
            link.extend(life_window(y, b.life_years).map(|yy| (layout.install(yy), -1.0)));
            lp.add_row(&link, existing);
            if let InitialSoc::Fixed(f) = b.initial_soc {
                lp.add_row(&[(layout.var(y, k, slots - 1, SlotVar::Soc), 1.0), (cap, -f)], 0.0);
            }
            let v = |t: usize, s: SlotVar| layout.var(y, k, t, s);
            for t in 0..slots {
                let re = day.micro_solar.values[t];
                lp.add_row(
                    &[
                        (v(t, SlotVar::Charge), -1.0),
                        (v(t, SlotVar::Discharge), 1.0),
                        (v(t, SlotVar::Purchase), 1.0),
                        (v(t, SlotVar::Curtail), -1.0),
                    ],
                    load[t] - re,
                );
                // The day is cyclic: the slot before the first is the last.
                let prev = if t == 0 { slots - 1 } else { t - 1 };
                let mut rec = vec![
                    (v(t, SlotVar::Soc), 1.0),
                    (v(t, SlotVar::Charge), -b.charge_efficiency * dt),
                    (v(t, SlotVar::Discharge), dt / b.discharge_efficiency),
                ];
                if prev != t {
                    rec.push((v(prev, SlotVar::Soc), -1.0));
                }
                lp.add_row(&rec, 0.0);
                let r = b.power_energy_ratio;
                lp.add_row(&[(v(t, SlotVar::Charge), 1.0), (cap, -r), (v(t, SlotVar::ChargeSlack), 1.0)], 0.0);
                lp.add_row(&[(v(t, SlotVar::Discharge), 1.0), (cap, -r), (v(t, SlotVar::DischargeSlack), 1.0)], 0.0);
                lp.add_row(&[(v(t, SlotVar::Soc), 1.0), (cap, -b.soc_min_frac), (v(t, SlotVar::SocMinSlack), -1.0)], 0.0);
                lp.add_row(&[(v(t, SlotVar::Soc), 1.0), (cap, -b.soc_max_frac), (v(t, SlotVar::SocMaxSlack), 1.0)], 0.0);
            }
        }
    }
    let lp = lp.build().map_err(|e| Error::Model(format!("plan LP assembly failed: {e}")))?;
    debug_assert_eq!(lp.n_vars(), layout.n_vars());
    debug_assert_eq!(lp.n_rows(), layout.n_rows());
    Ok((lp, layout))
}

/// Human-readable row name, e.g. `balance[year 1, SWD-HS-HW, slot 3]`.
pub fn row_label(problem: &PlanProblem, layout: &PlanLayout, row: usize) -> String {
    let (y, k, kind) = layout.describe(row);
    let scen = problem.scenarios.scenarios[k].label();
    match kind {
        RowKind::CapacityLink => format!("capacity_link[year {y}, {scen}]"),
        RowKind::InitialSoc => format!("initial_soc[year {y}, {scen}]"),
        RowKind::Slot(r, t) => {
            let name = match r {
                SlotRow::Balance => "balance",
                SlotRow::Recursion => "soc_recursion",
                SlotRow::ChargeLimit => "charge_limit",
                SlotRow::DischargeLimit => "discharge_limit",
                SlotRow::SocMin => "soc_min",
                SlotRow::SocMax => "soc_max",
            };
            format!("{name}[year {y}, {scen}, slot {t}]")
        }
    }
}
