//! Prices that respond to the microgrid's own purchases.
//!
//! With `λ = α·(net + p) + β`, a plan is a fixed point when it is optimal
//! for the prices its own purchases produce. Such a point minimizes the
//! convex function
//!
//! ```text
//! F(x) = Σ_y cost_y·u_y − salvage + Σ w·(α/2·p² + (α·net + β)·p)
//! ```
//!
//! over the plan polytope, because `∇F` is the LP objective evaluated at the
//! induced prices. The loop is Frank–Wolfe on `F`: solve the LP at the
//! current prices, then move toward that solution with an exact line search
//! whose step is capped by the damping factor.

use super::build::{energy_weight, BuildOptions, PlanLayout, SlotVar};
use super::{decode, solve_lp_at, DayDispatch, FeedbackReport, LpStats, PlanProblem};
use crate::error::Result;

pub(crate) struct FeedbackOutcome {
    pub installs: Vec<f64>,
    pub dispatch: Vec<Vec<DayDispatch>>,
    pub stats: LpStats,
    pub report: FeedbackReport,
}

/// `(α, β, net)` for every (year, scenario).
fn coefficients(problem: &PlanProblem, layout: &PlanLayout) -> Vec<Vec<(f64, f64, Vec<f64>)>> {
    let set = &problem.scenarios;
    (1..=layout.horizon)
        .map(|y| {
            (0..layout.scenarios)
                .map(|k| {
                    let f = set.price_model.fit(y, set.scenarios[k].day_type);
                    (f.alpha, f.beta, set.day(y, k).net.values.clone())
                })
                .collect()
        })
        .collect()
}

fn induced_prices(layout: &PlanLayout, coef: &[Vec<(f64, f64, Vec<f64>)>], x: &[f64]) -> Vec<Vec<Vec<f64>>> {
    (1..=layout.horizon)
        .map(|y| {
            (0..layout.scenarios)
                .map(|k| {
                    let (a, b, net) = &coef[y - 1][k];
                    (0..layout.slots).map(|t| a * (net[t] + x[layout.var(y, k, t, SlotVar::Purchase)]) + b).collect()
                })
                .collect()
        })
        .collect()
}

pub(crate) fn iterate(
    problem: &PlanProblem,
    options: BuildOptions,
    max_iters: usize,
    tol: f64,
    damping: f64,
) -> Result<FeedbackOutcome> {
    let first = solve_lp_at(problem, options, None)?;
    let mut stats = first.stats();
    let layout = first.layout;
    let coef = coefficients(problem, &layout);
    let mut x = first.x;
    let mut history = Vec::new();
    let mut converged = false;

    for _ in 0..max_iters {
        let prices = induced_prices(&layout, &coef, &x);
        let res = solve_lp_at(problem, options, Some(&prices))?;
        stats.iterations += res.iterations;
        let dx: Vec<f64> = res.x.iter().zip(&x).map(|(a, b)| a - b).collect();

        // F along x + θ·dx: slope g from the LP objective at the current
        // prices, curvature h from the quadratic price term.
        let g: f64 = res.lp.objective().iter().zip(&dx).map(|(c, d)| c * d).sum();
        let mut h = 0.0;
        let mut max_dp = vec![vec![0.0f64; layout.scenarios]; layout.horizon];
        for y in 1..=layout.horizon {
            for k in 0..layout.scenarios {
                let w = energy_weight(problem, y, k);
                let alpha = coef[y - 1][k].0;
                for t in 0..layout.slots {
                    let dp = dx[layout.var(y, k, t, SlotVar::Purchase)];
                    h += w * alpha * dp * dp;
                    max_dp[y - 1][k] = max_dp[y - 1][k].max(dp.abs());
                }
            }
        }
        let theta = if h > 0.0 {
            let t = -g / h;
            if t > 0.0 { t.min(1.0) } else { 0.0 }
        } else if g < 0.0 {
            1.0
        } else {
            0.0
        }
        .min(damping);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += theta * d;
        }
        let change = (0..layout.horizon)
            .flat_map(|y| (0..layout.scenarios).map(move |k| (y, k)))
            .map(|(y, k)| coef[y][k].0 * theta * max_dp[y][k])
            .fold(0.0, f64::max);
        history.push(change);
        if change < tol {
            converged = true;
            break;
        }
    }

    let prices = induced_prices(&layout, &coef, &x);
    let (installs, dispatch) = decode(problem, &layout, &x, &prices);
    Ok(FeedbackOutcome {
        installs,
        dispatch,
        stats,
        report: FeedbackReport { iterations: history.len(), converged, max_price_change: history },
    })
}
