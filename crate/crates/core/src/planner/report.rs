//! Text and CSV renderings of a solved plan.

use std::fmt::Write as _;

use super::PlanSolution;

pub const DISPATCH_HEADER: &str = "slot,load_mw,solar_mw,charge_mw,discharge_mw,purchase_mw,soc_mwh,price_usd_per_mwh";

/// Per-year install, capacity and cost table followed by totals and the
/// savings line.
pub fn summary_table(sol: &PlanSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "case {}", sol.label);
    let _ = writeln!(
        out,
        "{:>4} {:>12} {:>12} {:>10} {:>16} {:>16} {:>16}",
        "year", "install_mwh", "capacity_mwh", "$/kWh", "investment_usd", "energy_usd", "baseline_usd"
    );
    for y in 0..sol.installs.len() {
        let _ = writeln!(
            out,
            "{:>4} {:>12.3} {:>12.3} {:>10.2} {:>16.2} {:>16.2} {:>16.2}",
            y + 1,
            sol.installs[y],
            sol.capacity[y],
            sol.battery_price[y],
            sol.costs.investment[y],
            sol.costs.energy[y],
            sol.baseline.energy[y]
        );
    }
    let _ = writeln!(out, "total installed: {:.3} MWh", sol.total_installed());
    let _ = writeln!(out, "salvage: {:.2}", sol.costs.salvage);
    let _ = writeln!(out, "discounted cost: {:.2}", sol.costs.discounted_total);
    let _ = writeln!(out, "baseline cost: {:.2}", sol.baseline.discounted_total);
    // -0.00 would read oddly for a zero-install plan.
    let savings = if sol.savings.abs() < 5e-3 { 0.0 } else { sol.savings };
    let _ = writeln!(out, "savings: {savings:.2}");
    if let Some(fb) = &sol.feedback {
        let _ = writeln!(
            out,
            "price feedback: {} after {} iterations",
            if fb.converged { "converged" } else { "NOT converged" },
            fb.iterations
        );
    }
    out
}

/// Dispatch of one (year, scenario) day; `k` is the scenario index.
pub fn dispatch_csv(sol: &PlanSolution, year: usize, k: usize) -> String {
    let d = &sol.dispatch[year - 1][k];
    let mut out = String::with_capacity(80 * (d.soc.len() + 1));
    out.push_str(DISPATCH_HEADER);
    out.push('\n');
    // Solver noise below the printed precision would otherwise show as -0.000000.
    let v = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    for t in 0..d.soc.len() {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            t,
            v(d.load[t]),
            v(d.solar[t]),
            v(d.charge[t]),
            v(d.discharge[t]),
            v(d.purchase[t]),
            v(d.soc[t]),
            v(d.price[t])
        );
    }
    out
}

/// Year × case grid of installed MWh. All solutions must share a horizon.
pub fn install_grid(solutions: &[PlanSolution]) -> String {
    let mut out = String::from("year");
    for s in solutions {
        out.push(',');
        out.push_str(&s.label);
    }
    out.push('\n');
    let years = solutions.first().map_or(0, |s| s.installs.len());
    for y in 0..years {
        let _ = write!(out, "{}", y + 1);
        for s in solutions {
            let _ = write!(out, ",{:.6}", s.installs[y]);
        }
        out.push('\n');
    }
    out
}
