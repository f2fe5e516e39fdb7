//! Battery sizing and dispatch over a multi-year horizon of scenario days.

pub mod audit;
pub mod build;
pub mod costs;
mod decompose;
pub mod feedback;
pub mod price_path;
pub mod report;

use serde::{Deserialize, Serialize};
use sparse_simplex::{solve, LpInstance, LpResult, SolveOptions, Status};

use crate::error::{Error, Result};
use crate::scenarios::{validate as validate_scenarios, ScenarioSet};
use build::{build_plan_lp, net_load, row_label, BuildOptions, PlanLayout, RowKind, SlotRow, SlotVar};
use costs::{capacity_schedule, discount_factor, salvage_undiscounted};
use price_path::PricePath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSoc {
    /// The day starts wherever it ends.
    Free,
    /// The day starts and ends at this fraction of capacity.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatterySpec {
    pub soc_min_frac: f64,
    pub soc_max_frac: f64,
    /// Power rating per MWh of capacity, 1/h.
    pub power_energy_ratio: f64,
    pub life_years: usize,
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
    pub initial_soc: InitialSoc,
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            soc_min_frac: 0.10,
            soc_max_frac: 0.95,
            power_energy_ratio: 2.0,
            life_years: 10,
            charge_efficiency: 1.0,
            discharge_efficiency: 1.0,
            initial_soc: InitialSoc::Free,
        }
    }
}

impl BatterySpec {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..1.0).contains(&self.soc_min_frac)
            && self.soc_min_frac < self.soc_max_frac
            && self.soc_max_frac <= 1.0;
        if !ok {
            return Err(Error::Config(format!(
                "need 0 ≤ soc_min_frac < soc_max_frac ≤ 1, got {} and {}",
                self.soc_min_frac, self.soc_max_frac
            )));
        }
        if !(self.power_energy_ratio > 0.0 && self.power_energy_ratio.is_finite()) {
            return Err(Error::Config(format!("power_energy_ratio must be positive, got {}", self.power_energy_ratio)));
        }
        if self.life_years == 0 {
            return Err(Error::Config("life_years must be at least 1".into()));
        }
        for (name, eta) in [("charge_efficiency", self.charge_efficiency), ("discharge_efficiency", self.discharge_efficiency)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {eta}")));
            }
        }
        if let InitialSoc::Fixed(f) = self.initial_soc {
            if !(self.soc_min_frac..=self.soc_max_frac).contains(&f) {
                return Err(Error::Config(format!("fixed initial SOC {f} lies outside the SOC band")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
#[derive(Default)]
pub enum FeedbackMode {
    /// Prices are fixed by the scenario data.
    #[default]
    Off,
    /// Prices respond to the microgrid's own purchases.
    FixedPoint {
        max_iters: usize,
        /// Stop once no price moves by more than this, $/MWh.
        tol: f64,
        /// Upper bound on the step taken toward each new LP solution.
        damping: f64,
    },
}


/// How the plan LP is solved. Both routes reach the same optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Monolithic up to [`MONOLITHIC_MAX_VARS`] variables, decomposed above.
    #[default]
    Auto,
    /// One simplex solve of the whole LP.
    Monolithic,
    /// Benders decomposition over the installs, one LP per scenario day.
    Decomposed,
}

pub const MONOLITHIC_MAX_VARS: usize = 5_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanProblem {
    pub scenarios: ScenarioSet,
    pub battery: BatterySpec,
    pub price_path: PricePath,
    /// γ in `v_y = (1 − γ)^y`.
    pub discount_rate: f64,
    /// P_L, MW.
    pub congestion_limit_mw: f64,
    pub allow_export: bool,
    /// Days per year represented by the probability-weighted scenario days.
    pub annualization_days: f64,
    /// Constant local generation subtracted from the microgrid demand, MW.
    pub gas_turbine_mw: f64,
    /// Capacity already installed and free of charge, MWh, in every year.
    pub existing_capacity_mwh: f64,
    pub feedback: FeedbackMode,
    pub method: SolveMethod,
}

impl PlanProblem {
    /// Default battery and market parameters around the given scenarios and
    /// price path.
    pub fn new(scenarios: ScenarioSet, price_path: PricePath) -> Self {
        PlanProblem {
            scenarios,
            battery: BatterySpec::default(),
            price_path,
            discount_rate: 0.05,
            congestion_limit_mw: 45.0,
            allow_export: false,
            annualization_days: 365.0,
            gas_turbine_mw: 20.0,
            existing_capacity_mwh: 0.0,
            feedback: FeedbackMode::Off,
            method: SolveMethod::Auto,
        }
    }

    pub fn horizon(&self) -> usize {
        self.scenarios.horizon()
    }

    pub fn validate(&self) -> Result<()> {
        self.battery.validate()?;
        self.price_path.validate(self.horizon())?;
        let diags = validate_scenarios(&self.scenarios);
        if !diags.is_empty() {
            return Err(Error::Model(format!("scenario set is invalid: {}", diags.join("; "))));
        }
        let slots = self.scenarios.slots() as f64;
        if (slots * self.scenarios.step_hours() - 24.0).abs() > 1e-9 {
            return Err(Error::Model(format!("{slots} slots of {} h do not make a day", self.scenarios.step_hours())));
        }
        if !(0.0..1.0).contains(&self.discount_rate) {
            return Err(Error::Config(format!("discount rate must lie in [0, 1), got {}", self.discount_rate)));
        }
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        for (name, v) in [
            ("congestion_limit_mw", self.congestion_limit_mw),
            ("annualization_days", self.annualization_days),
            ("existing_capacity_mwh", self.existing_capacity_mwh),
        ] {
            if !finite_nonneg(v) {
                return Err(Error::Config(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        if !self.gas_turbine_mw.is_finite() {
            return Err(Error::Config("gas_turbine_mw must be finite".into()));
        }
        if let FeedbackMode::FixedPoint { max_iters, tol, damping } = self.feedback {
            if max_iters == 0 || !(tol > 0.0) || !(damping > 0.0 && damping <= 1.0) {
                return Err(Error::Config("feedback needs max_iters ≥ 1, tol > 0 and damping in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// One (year, scenario) day of battery operation. Power in MW, energy in MWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayDispatch {
    /// Microgrid demand less gas-turbine output.
    pub load: Vec<f64>,
    /// Local solar actually used (available minus curtailed).
    pub solar: Vec<f64>,
    pub curtailed: Vec<f64>,
    pub charge: Vec<f64>,
    pub discharge: Vec<f64>,
    pub purchase: Vec<f64>,
    /// State of charge at the end of each slot.
    pub soc: Vec<f64>,
    pub initial_soc: f64,
    /// $/MWh the purchases were settled at.
    pub price: Vec<f64>,
}

/// Undiscounted yearly amounts plus the discounted total, all in $.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub investment: Vec<f64>,
    /// Expected annual cost of grid purchases.
    pub energy: Vec<f64>,
    /// Residual value at the end of the horizon.
    pub salvage: f64,
    pub discounted_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub iterations: usize,
    pub converged: bool,
    /// Largest price change in each iteration, $/MWh.
    pub max_price_change: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpStats {
    pub variables: usize,
    pub rows: usize,
    pub nonzeros: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolution {
    pub label: String,
    /// MWh installed at the start of each plan year.
    pub installs: Vec<f64>,
    /// MWh in service each year, pre-installed capacity included.
    pub capacity: Vec<f64>,
    pub battery_price: Vec<f64>,
    pub costs: CostSummary,
    pub baseline: CostSummary,
    /// Baseline minus plan discounted total.
    pub savings: f64,
    pub lp: LpStats,
    pub feedback: Option<FeedbackReport>,
    /// `dispatch[y - 1][k]` for plan year `y` and scenario `k`.
    pub dispatch: Vec<Vec<DayDispatch>>,
}

impl PlanSolution {
    pub fn total_installed(&self) -> f64 {
        self.installs.iter().sum()
    }

    /// First plan year (1-based) with an install above `tol` MWh.
    pub fn first_install_year(&self, tol: f64) -> Option<usize> {
        self.installs.iter().position(|&u| u > tol).map(|k| k + 1)
    }
}

pub(crate) fn solver_options() -> SolveOptions {
    SolveOptions::default()
}

pub(crate) fn run_lp(problem: &PlanProblem, lp: &LpInstance, layout: &PlanLayout) -> Result<LpResult> {
    let res = solve(lp, &solver_options()).map_err(|e| Error::Model(format!("plan LP rejected by the solver: {e}")))?;
    match res.status {
        Status::Optimal => Ok(res),
        Status::Infeasible => Err(Error::Optimization { status: res.status, diagnosis: infeasibility_diagnosis(problem, layout, &res) }),
        Status::Unbounded => Err(Error::Optimization {
            status: res.status,
            diagnosis: "the objective decreases without limit; check for negative battery prices".into(),
        }),
        Status::IterationLimit => Err(Error::Optimization {
            status: res.status,
            diagnosis: format!("stopped after {} simplex iterations", res.iterations),
        }),
    }
}

fn infeasibility_diagnosis(problem: &PlanProblem, layout: &PlanLayout, res: &LpResult) -> String {
    let mut rows = res.infeasible_rows.clone();
    // Balance rows first: they are the usual culprits and name the slot.
    rows.sort_by_key(|&r| (!matches!(layout.describe(r).2, RowKind::Slot(SlotRow::Balance, _)), r));
    let shown: Vec<String> = rows.iter().take(5).map(|&r| row_label(problem, layout, r)).collect();
    let more = rows.len().saturating_sub(shown.len());
    let mut msg = if shown.is_empty() {
        "no feasible dispatch exists".to_string()
    } else {
        format!("violated constraints: {}", shown.join(", "))
    };
    if more > 0 {
        msg.push_str(&format!(" and {more} more"));
    }
    msg
}

pub(crate) fn decode(problem: &PlanProblem, layout: &PlanLayout, x: &[f64], prices: &[Vec<Vec<f64>>]) -> (Vec<f64>, Vec<Vec<DayDispatch>>) {
    let installs: Vec<f64> = (1..=layout.horizon).map(|y| x[layout.install(y)].max(0.0)).collect();
    let dispatch = (1..=layout.horizon)
        .map(|y| {
            (0..layout.scenarios)
                .map(|k| {
                    let day = problem.scenarios.day(y, k);
                    let col = |s: SlotVar| (0..layout.slots).map(|t| x[layout.var(y, k, t, s)]).collect::<Vec<f64>>();
                    let curtailed = col(SlotVar::Curtail);
                    let soc = col(SlotVar::Soc);
                    DayDispatch {
                        load: net_load(problem, y, k),
                        solar: day.micro_solar.values.iter().zip(&curtailed).map(|(s, q)| s - q).collect(),
                        charge: col(SlotVar::Charge),
                        discharge: col(SlotVar::Discharge),
                        purchase: col(SlotVar::Purchase),
                        initial_soc: soc[layout.slots - 1],
                        soc,
                        curtailed,
                        price: prices[y - 1][k].clone(),
                    }
                })
                .collect()
        })
        .collect();
    (installs, dispatch)
}

/// Recomputes the cost breakdown from decoded installs and purchases.
pub fn evaluate_costs(problem: &PlanProblem, installs: &[f64], dispatch: &[Vec<DayDispatch>]) -> CostSummary {
    let y_end = problem.horizon();
    let dt = problem.scenarios.step_hours();
    let investment: Vec<f64> =
        installs.iter().zip(&problem.price_path.cost_per_kwh).map(|(u, c)| u * c * 1000.0).collect();
    let energy: Vec<f64> = dispatch
        .iter()
        .map(|days| {
            days.iter()
                .zip(&problem.scenarios.scenarios)
                .map(|(d, s)| {
                    let daily: f64 = d.purchase.iter().zip(&d.price).map(|(p, l)| p * l * dt).sum();
                    problem.annualization_days * s.probability * daily
                })
                .sum()
        })
        .collect();
    let salvage = salvage_undiscounted(installs, &problem.price_path.cost_per_kwh, problem.battery.life_years, y_end);
    let discounted_total = (1..=y_end)
        .map(|y| discount_factor(problem.discount_rate, y) * (investment[y - 1] + energy[y - 1]))
        .sum::<f64>()
        - discount_factor(problem.discount_rate, y_end) * salvage;
    CostSummary { investment, energy, salvage, discounted_total }
}

pub(crate) fn exogenous_prices(problem: &PlanProblem) -> Vec<Vec<Vec<f64>>> {
    problem.scenarios.per_year.iter().map(|days| days.iter().map(|d| d.price.values.clone()).collect()).collect()
}

/// Plan LP at the given prices (scenario prices if `None`), solved by the
/// problem's method. `x` is always in the monolithic layout.
pub(crate) struct LpRun {
    pub x: Vec<f64>,
    pub lp: LpInstance,
    pub layout: PlanLayout,
    pub iterations: usize,
}

pub(crate) fn solve_lp_at(problem: &PlanProblem, options: BuildOptions, prices: Option<&[Vec<Vec<f64>>]>) -> Result<LpRun> {
    let (lp, layout) = build_plan_lp(problem, options, prices)?;
    let decomposed = match problem.method {
        SolveMethod::Auto => layout.n_vars() > MONOLITHIC_MAX_VARS,
        SolveMethod::Monolithic => false,
        SolveMethod::Decomposed => true,
    };
    if decomposed {
        let owned;
        let prices = match prices {
            Some(p) => p,
            None => {
                owned = exogenous_prices(problem);
                &owned
            }
        };
        let dec = decompose::solve_decomposed(problem, options.allow_investment, prices)?;
        let x = decompose::to_monolithic(problem, &layout, &dec);
        Ok(LpRun { x, lp, layout, iterations: dec.iterations })
    } else {
        let res = run_lp(problem, &lp, &layout)?;
        Ok(LpRun { x: res.x, lp, layout, iterations: res.iterations })
    }
}

impl LpRun {
    fn stats(&self) -> LpStats {
        LpStats { variables: self.lp.n_vars(), rows: self.lp.n_rows(), nonzeros: self.lp.nnz(), iterations: self.iterations }
    }
}

struct ModeSolution {
    installs: Vec<f64>,
    dispatch: Vec<Vec<DayDispatch>>,
    stats: LpStats,
    feedback: Option<FeedbackReport>,
}

fn solve_mode(problem: &PlanProblem, options: BuildOptions) -> Result<ModeSolution> {
    match problem.feedback {
        FeedbackMode::Off => {
            let run = solve_lp_at(problem, options, None)?;
            let (installs, dispatch) = decode(problem, &run.layout, &run.x, &exogenous_prices(problem));
            Ok(ModeSolution { installs, dispatch, stats: run.stats(), feedback: None })
        }
        FeedbackMode::FixedPoint { max_iters, tol, damping } => {
            let out = feedback::iterate(problem, options, max_iters, tol, damping)?;
            Ok(ModeSolution { installs: out.installs, dispatch: out.dispatch, stats: out.stats, feedback: Some(out.report) })
        }
    }
}

/// Solves the plan and the no-battery baseline.
pub fn solve_plan(problem: &PlanProblem) -> Result<PlanSolution> {
    problem.validate()?;
    let plan = solve_mode(problem, BuildOptions { allow_investment: true })?;
    let base = solve_mode(problem, BuildOptions { allow_investment: false })?;
    let costs = evaluate_costs(problem, &plan.installs, &plan.dispatch);
    let baseline = evaluate_costs(problem, &base.installs, &base.dispatch);
    let mut capacity = capacity_schedule(&plan.installs, problem.battery.life_years, problem.horizon());
    capacity.iter_mut().for_each(|c| *c += problem.existing_capacity_mwh);
    Ok(PlanSolution {
        label: problem.price_path.label.clone(),
        savings: baseline.discounted_total - costs.discounted_total,
        installs: plan.installs,
        capacity,
        battery_price: problem.price_path.cost_per_kwh[..problem.horizon()].to_vec(),
        costs,
        baseline,
        lp: plan.stats,
        feedback: plan.feedback,
        dispatch: plan.dispatch,
    })
}
