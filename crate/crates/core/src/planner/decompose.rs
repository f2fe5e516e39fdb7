//! Benders decomposition of the plan LP.
//!
//! Given the capacity `K_y` in service, every (year, scenario) day is an
//! independent LP in which the capacity limits are plain variable bounds.
//! Its optimal value `V_{y,i}(K)` is convex and piecewise linear in `K`, and
//! the reduced costs of the bound-limited variables give an exact
//! subgradient: with a dual solution `(y, d)` fixed, the dual objective is
//! affine in the bounds and never exceeds `V` anywhere.
//!
//! The master LP holds the installs and one epigraph variable per year,
//! `θ_y ≥ Σ_i V_{y,i}(K_y)`, approximated from below by accumulated cuts.
//! It stops when the master bound meets the best evaluated plan. Capacity
//! levels a day cannot operate at all are cut off by feasibility cuts from a
//! minimum-capacity LP.

use rayon::prelude::*;
use sparse_simplex::{solve, Bounds, LpBuilder, LpInstance, LpResult, Status};

use super::build::{energy_weight, install_cost, net_load, PlanLayout, SlotVar};
use super::costs::life_window;
use super::{solver_options, InitialSoc, PlanProblem};
use crate::error::{Error, Result};

const MAX_ROUNDS: usize = 500;
const GAP_TOL: f64 = 1e-9;

/// Per-slot variables of a day LP: charge, discharge, purchase, SOC,
/// curtailment.
const DAY_VARS: usize = 5;

enum Capacity {
    Fixed(f64),
    /// Capacity is a variable (index `5·T`) minimized by the objective.
    Minimized,
}

fn build_day_lp(problem: &PlanProblem, year: usize, k: usize, cap: Capacity, prices: &[f64]) -> Result<LpInstance> {
    let set = &problem.scenarios;
    let day = set.day(year, k);
    let b = &problem.battery;
    let dt = set.step_hours();
    let slots = set.slots();
    let load = net_load(problem, year, k);
    let w = energy_weight(problem, year, k);
    let p_lo = if problem.allow_export { -problem.congestion_limit_mw } else { 0.0 };
    let minimize = matches!(cap, Capacity::Minimized);
    let kv = slots * DAY_VARS;

    let mut lp = LpBuilder::with_capacity(kv + 1 + 4 * slots, 6 * slots + 1, 14 * slots);
    for t in 0..slots {
        let re = day.micro_solar.values[t];
        let cost = if minimize { 0.0 } else { w * prices[t] };
        match cap {
            Capacity::Fixed(kk) => {
                let pmax = b.power_energy_ratio * kk;
                let (elo, ehi) = match b.initial_soc {
                    InitialSoc::Fixed(f) if t == slots - 1 => (f * kk, f * kk),
                    _ => (b.soc_min_frac * kk, b.soc_max_frac * kk),
                };
                lp.add_var(Bounds::new(0.0, pmax), 0.0);
                lp.add_var(Bounds::new(0.0, pmax), 0.0);
                lp.add_var(Bounds::new(p_lo, problem.congestion_limit_mw), cost);
                lp.add_var(Bounds::new(elo, ehi), 0.0);
            }
            Capacity::Minimized => {
                lp.add_var(Bounds::NON_NEGATIVE, 0.0);
                lp.add_var(Bounds::NON_NEGATIVE, 0.0);
                lp.add_var(Bounds::new(p_lo, problem.congestion_limit_mw), cost);
                lp.add_var(Bounds::NON_NEGATIVE, 0.0);
            }
        }
        lp.add_var(Bounds::new(0.0, re), 0.0);
    }
    let v = |t: usize, s: usize| t * DAY_VARS + s;
    let (c, d, p, e, q) = (0, 1, 2, 3, 4);
    for t in 0..slots {
        let re = day.micro_solar.values[t];
        lp.add_row(&[(v(t, c), -1.0), (v(t, d), 1.0), (v(t, p), 1.0), (v(t, q), -1.0)], load[t] - re);
        let prev = if t == 0 { slots - 1 } else { t - 1 };
        let mut rec = vec![(v(t, e), 1.0), (v(t, c), -b.charge_efficiency * dt), (v(t, d), dt / b.discharge_efficiency)];
        if prev != t {
            rec.push((v(prev, e), -1.0));
        }
        lp.add_row(&rec, 0.0);
    }
    if minimize {
        let kk = lp.add_var(Bounds::NON_NEGATIVE, 1.0);
        debug_assert_eq!(kk, kv);
        let r = b.power_energy_ratio;
        for t in 0..slots {
            for (var, coef, sign) in [(c, r, 1.0), (d, r, 1.0), (e, b.soc_min_frac, -1.0), (e, b.soc_max_frac, 1.0)] {
                let s = lp.add_var(Bounds::NON_NEGATIVE, 0.0);
                lp.add_row(&[(v(t, var), 1.0), (kk, -coef), (s, sign)], 0.0);
            }
        }
        if let InitialSoc::Fixed(f) = b.initial_soc {
            lp.add_row(&[(v(slots - 1, e), 1.0), (kk, -f)], 0.0);
        }
    }
    lp.build().map_err(|e| Error::Model(format!("day LP assembly failed: {e}")))
}

/// Maps a day-LP row to the corresponding monolithic row label.
fn day_row_label(problem: &PlanProblem, year: usize, k: usize, row: usize) -> String {
    let scen = problem.scenarios.scenarios[k].label();
    let slots = problem.scenarios.slots();
    if row < 2 * slots {
        let name = if row.is_multiple_of(2) { "balance" } else { "soc_recursion" };
        format!("{name}[year {year}, {scen}, slot {}]", row / 2)
    } else if row < 6 * slots {
        let t = (row - 2 * slots) / 4;
        let name = ["charge_limit", "discharge_limit", "soc_min", "soc_max"][(row - 2 * slots) % 4];
        format!("{name}[year {year}, {scen}, slot {t}]")
    } else {
        format!("initial_soc[year {year}, {scen}]")
    }
}

fn infeasible_error(problem: &PlanProblem, year: usize, k: usize, res: &LpResult) -> Error {
    let mut rows = res.infeasible_rows.clone();
    rows.sort_by_key(|&r| (r >= 2 * problem.scenarios.slots() || r % 2 != 0, r));
    let shown: Vec<String> = rows.iter().take(5).map(|&r| day_row_label(problem, year, k, r)).collect();
    let diagnosis = if shown.is_empty() {
        format!("no feasible dispatch exists for year {year}, {}", problem.scenarios.scenarios[k].label())
    } else {
        format!("violated constraints: {}", shown.join(", "))
    };
    Error::Optimization { status: Status::Infeasible, diagnosis }
}

fn run(lp: &LpInstance) -> Result<LpResult> {
    solve(lp, &solver_options()).map_err(|e| Error::Model(format!("day LP rejected by the solver: {e}")))
}

/// Solution of one day at a fixed capacity.
#[derive(Debug, Clone)]
pub(crate) struct DaySolution {
    pub value: f64,
    pub slope: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

enum DayOutcome {
    Solved(DaySolution),
    /// The capacity is too small; this much is needed.
    NeedsCapacity(f64, usize),
}

fn solve_day(problem: &PlanProblem, year: usize, k: usize, cap: f64, prices: &[f64]) -> Result<DayOutcome> {
    let lp = build_day_lp(problem, year, k, Capacity::Fixed(cap), prices)?;
    let res = run(&lp)?;
    match res.status {
        Status::Optimal => {
            let b = &problem.battery;
            let slots = problem.scenarios.slots();
            let mut slope = 0.0;
            for t in 0..slots {
                let rc = |s: usize| res.reduced_costs[t * DAY_VARS + s];
                for s in [0, 1] {
                    slope += b.power_energy_ratio * rc(s).min(0.0);
                }
                let de = rc(3);
                slope += match b.initial_soc {
                    InitialSoc::Fixed(f) if t == slots - 1 => f * de,
                    _ if de > 0.0 => b.soc_min_frac * de,
                    _ => b.soc_max_frac * de,
                };
            }
            Ok(DayOutcome::Solved(DaySolution { value: res.objective_value, slope, x: res.x, iterations: res.iterations }))
        }
        Status::Infeasible => {
            let min_lp = build_day_lp(problem, year, k, Capacity::Minimized, prices)?;
            let min_res = run(&min_lp)?;
            match min_res.status {
                Status::Optimal => {
                    let need = min_res.x[slots_of(problem) * DAY_VARS];
                    Ok(DayOutcome::NeedsCapacity(need.max(cap * (1.0 + 1e-9) + 1e-9), res.iterations + min_res.iterations))
                }
                Status::Infeasible => Err(infeasible_error(problem, year, k, &min_res)),
                other => Err(Error::Optimization { status: other, diagnosis: format!("minimum-capacity LP for year {year}") }),
            }
        }
        other => Err(Error::Optimization {
            status: other,
            diagnosis: format!("day LP for year {year}, {} stopped after {} iterations", problem.scenarios.scenarios[k].label(), res.iterations),
        }),
    }
}

fn slots_of(problem: &PlanProblem) -> usize {
    problem.scenarios.slots()
}

/// Installs and per-day solutions at the decomposition optimum.
pub(crate) struct Decomposed {
    pub installs: Vec<f64>,
    pub capacity: Vec<f64>,
    pub days: Vec<Vec<DaySolution>>,
    pub iterations: usize,
}

struct Cut {
    year: usize,
    slope: f64,
    /// `θ_y ≥ intercept + slope·Σ_window u`.
    intercept: f64,
    feasibility: bool,
}

/// Largest capacity worth considering: beyond it the usable SOC band holds
/// more than a day's worth of every flow the connection and solar allow,
/// and the power rating exceeds any single flow.
fn capacity_cap(problem: &PlanProblem) -> f64 {
    let b = &problem.battery;
    let dt = problem.scenarios.step_hours();
    let (mut energy, mut power): (f64, f64) = (0.0, 0.0);
    for y in 1..=problem.horizon() {
        for k in 0..problem.scenarios.scenarios.len() {
            let day = problem.scenarios.day(y, k);
            let load = net_load(problem, y, k);
            let mut total = 0.0;
            for (l, s) in load.iter().zip(&day.micro_solar.values) {
                let flow = l.abs() + s + problem.congestion_limit_mw;
                total += flow * dt;
                power = power.max(flow);
            }
            energy = energy.max(total);
        }
    }
    10.0 * (energy / (b.soc_max_frac - b.soc_min_frac)).max(power / b.power_energy_ratio) + 1.0
}

fn capacity_in(problem: &PlanProblem, installs: &[f64], existing: f64) -> Vec<f64> {
    (1..=problem.horizon())
        .map(|y| existing + life_window(y, problem.battery.life_years).map(|j| installs[j - 1]).sum::<f64>())
        .collect()
}

fn solve_master(problem: &PlanProblem, cuts: &[Cut], u_max: f64, allow_investment: bool) -> Result<(Vec<f64>, f64)> {
    let y_end = problem.horizon();
    let mut lp = LpBuilder::with_capacity(2 * y_end + cuts.len(), cuts.len(), cuts.len() * (y_end + 2));
    let ub = if allow_investment { u_max } else { 0.0 };
    for y in 1..=y_end {
        lp.add_var(Bounds::new(0.0, ub), install_cost(problem, y));
    }
    for _ in 1..=y_end {
        lp.add_var(Bounds::FREE, 1.0);
    }
    for cut in cuts {
        let s = lp.add_var(Bounds::NON_NEGATIVE, 0.0);
        let mut row: Vec<(usize, f64)> =
            life_window(cut.year, problem.battery.life_years).map(|j| (j - 1, -cut.slope)).collect();
        if cut.feasibility {
            row.iter_mut().for_each(|e| e.1 = 1.0);
        } else {
            row.push((y_end + cut.year - 1, 1.0));
        }
        row.push((s, -1.0));
        lp.add_row(&row, cut.intercept);
    }
    let lp = lp.build().map_err(|e| Error::Model(format!("master LP assembly failed: {e}")))?;
    let res = solve(&lp, &solver_options()).map_err(|e| Error::Model(format!("master LP rejected: {e}")))?;
    match res.status {
        Status::Optimal => Ok((res.x[..y_end].iter().map(|u| u.max(0.0)).collect(), res.objective_value)),
        other => Err(Error::Optimization {
            status: other,
            diagnosis: "no install schedule satisfies the minimum-capacity requirements".into(),
        }),
    }
}

pub(crate) fn solve_decomposed(
    problem: &PlanProblem,
    allow_investment: bool,
    prices: &[Vec<Vec<f64>>],
) -> Result<Decomposed> {
    let y_end = problem.horizon();
    let n_scen = problem.scenarios.scenarios.len();
    let existing = if allow_investment { problem.existing_capacity_mwh } else { 0.0 };
    let u_max = capacity_cap(problem);
    let pairs: Vec<(usize, usize)> = (1..=y_end).flat_map(|y| (0..n_scen).map(move |k| (y, k))).collect();

    let mut cuts: Vec<Cut> = Vec::new();
    let mut installs = vec![0.0; y_end];
    let mut lower = f64::NEG_INFINITY;
    let mut best: Option<(f64, Vec<f64>, Vec<Vec<DaySolution>>)> = None;
    let mut iterations = 0;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let capacity = capacity_in(problem, &installs, existing);
        let outcomes = pairs
            .par_iter()
            .map(|&(y, k)| solve_day(problem, y, k, capacity[y - 1], &prices[y - 1][k]))
            .collect::<Result<Vec<_>>>()?;

        let mut feasible = true;
        let mut year_value = vec![0.0; y_end];
        let mut year_slope = vec![0.0; y_end];
        let mut need = vec![0.0f64; y_end];
        let mut days: Vec<Vec<DaySolution>> = vec![Vec::with_capacity(n_scen); y_end];
        for (&(y, _), out) in pairs.iter().zip(outcomes) {
            match out {
                DayOutcome::Solved(sol) => {
                    iterations += sol.iterations;
                    year_value[y - 1] += sol.value;
                    year_slope[y - 1] += sol.slope;
                    days[y - 1].push(sol);
                }
                DayOutcome::NeedsCapacity(c, it) => {
                    iterations += it;
                    feasible = false;
                    need[y - 1] = need[y - 1].max(c);
                }
            }
        }
        if !allow_investment && !feasible {
            let (y, k) = pairs
                .iter()
                .copied()
                .find(|&(y, _)| need[y - 1] > 0.0)
                .expect("an infeasible day exists");
            let lp = build_day_lp(problem, y, k, Capacity::Fixed(0.0), &prices[y - 1][k])?;
            return Err(infeasible_error(problem, y, k, &run(&lp)?));
        }
        if feasible {
            let upper: f64 = (1..=y_end).map(|y| install_cost(problem, y) * installs[y - 1]).sum::<f64>()
                + year_value.iter().sum::<f64>();
            if best.as_ref().is_none_or(|(b, _, _)| upper < *b) {
                best = Some((upper, installs.clone(), days));
            }
            for y in 1..=y_end {
                cuts.push(Cut {
                    year: y,
                    slope: year_slope[y - 1],
                    intercept: year_value[y - 1] + year_slope[y - 1] * (existing - capacity[y - 1]),
                    feasibility: false,
                });
            }
        } else {
            for y in 1..=y_end {
                if need[y - 1] > capacity[y - 1] {
                    cuts.push(Cut { year: y, slope: 1.0, intercept: need[y - 1] - existing, feasibility: true });
                }
            }
        }

        if !allow_investment {
            break;
        }
        let upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        if rounds >= MAX_ROUNDS || (upper.is_finite() && upper - lower <= GAP_TOL * upper.abs().max(1.0)) {
            break;
        }
        // Until every year has an optimality cut the epigraph variables are
        // unbounded below; evaluate u = 0 first, which always yields cuts
        // once the minimum capacities are met.
        let years_with_cuts = (1..=y_end).filter(|&y| cuts.iter().any(|c| c.year == y && !c.feasibility)).count();
        if years_with_cuts < y_end {
            let (u, _) = solve_master_feasibility(problem, &cuts, u_max)?;
            installs = u;
            continue;
        }
        let (u, master_obj) = solve_master(problem, &cuts, u_max, true)?;
        lower = lower.max(master_obj);
        if upper - lower <= GAP_TOL * upper.abs().max(1.0) {
            break;
        }
        installs = u;
    }
    let (_, installs, days) = best.ok_or_else(|| Error::Optimization {
        status: Status::IterationLimit,
        diagnosis: format!("no feasible install schedule found in {rounds} rounds"),
    })?;
    let capacity = capacity_in(problem, &installs, existing);
    Ok(Decomposed {
        installs,
        capacity,
        days,
        iterations,
    })
}

/// Cheapest installs meeting the feasibility cuts alone.
fn solve_master_feasibility(problem: &PlanProblem, cuts: &[Cut], u_max: f64) -> Result<(Vec<f64>, f64)> {
    let feas: Vec<Cut> = cuts
        .iter()
        .filter(|c| c.feasibility)
        .map(|c| Cut { year: c.year, slope: c.slope, intercept: c.intercept, feasibility: true })
        .collect();
    let y_end = problem.horizon();
    let mut lp = LpBuilder::new();
    for y in 1..=y_end {
        lp.add_var(Bounds::new(0.0, u_max), install_cost(problem, y).max(1e-9));
    }
    for cut in &feas {
        let s = lp.add_var(Bounds::NON_NEGATIVE, 0.0);
        let mut row: Vec<(usize, f64)> = life_window(cut.year, problem.battery.life_years).map(|j| (j - 1, 1.0)).collect();
        row.push((s, -1.0));
        lp.add_row(&row, cut.intercept);
    }
    let lp = lp.build().map_err(|e| Error::Model(format!("master LP assembly failed: {e}")))?;
    let res = solve(&lp, &solver_options()).map_err(|e| Error::Model(format!("master LP rejected: {e}")))?;
    match res.status {
        Status::Optimal => Ok((res.x[..y_end].iter().map(|u| u.max(0.0)).collect(), res.objective_value)),
        other => Err(Error::Optimization {
            status: other,
            diagnosis: "no install schedule satisfies the minimum-capacity requirements".into(),
        }),
    }
}

/// Expands a decomposed solution into the monolithic variable vector.
pub(crate) fn to_monolithic(problem: &PlanProblem, layout: &PlanLayout, dec: &Decomposed) -> Vec<f64> {
    let b = &problem.battery;
    let mut x = vec![0.0; layout.n_vars()];
    for y in 1..=layout.horizon {
        x[layout.install(y)] = dec.installs[y - 1];
        let cap = dec.capacity[y - 1];
        for k in 0..layout.scenarios {
            x[layout.capacity(y, k)] = cap;
            let day = &dec.days[y - 1][k].x;
            for t in 0..layout.slots {
                let g = |s: usize| day[t * DAY_VARS + s];
                let (c, d, p, e, q) = (g(0), g(1), g(2), g(3), g(4));
                let pmax = b.power_energy_ratio * cap;
                let vals = [
                    (SlotVar::Charge, c),
                    (SlotVar::Discharge, d),
                    (SlotVar::Purchase, p),
                    (SlotVar::Soc, e),
                    (SlotVar::Curtail, q),
                    (SlotVar::ChargeSlack, (pmax - c).max(0.0)),
                    (SlotVar::DischargeSlack, (pmax - d).max(0.0)),
                    (SlotVar::SocMinSlack, (e - b.soc_min_frac * cap).max(0.0)),
                    (SlotVar::SocMaxSlack, (b.soc_max_frac * cap - e).max(0.0)),
                ];
                for (s, v) in vals {
                    x[layout.var(y, k, t, s)] = v;
                }
            }
        }
    }
    x
}
