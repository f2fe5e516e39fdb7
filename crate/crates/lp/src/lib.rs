//! Sparse bounded primal simplex for equality-form linear programs.
//!
//! ```
//! use sparse_simplex::{solve, Bounds, LpBuilder, SolveOptions, Status};
//!
//! // maximize x + y subject to x + 2y = 4, 0 ≤ x ≤ 3, y ≥ 0
//! let mut b = LpBuilder::new();
//! let x = b.add_var(Bounds::new(0.0, 3.0), -1.0);
//! let y = b.add_var(Bounds::NON_NEGATIVE, -1.0);
//! b.add_row(&[(x, 1.0), (y, 2.0)], 4.0);
//! let res = solve(&b.build().unwrap(), &SolveOptions::default()).unwrap();
//! assert_eq!(res.status, Status::Optimal);
//! assert!((res.objective_value + 3.5).abs() < 1e-9);
//! ```

mod check;
mod error;
mod instance;
mod lu;
mod mps;
mod presolve;
mod scale;
mod simplex;

use std::fmt;

pub use check::{check_solution, SolutionCheck};
pub use error::LpError;
pub use instance::{Bounds, LpBuilder, LpInstance};
pub use mps::{read_mps, write_mps};
pub use presolve::{presolve, PostsolveMap, Presolve, Presolved};

use scale::Scaling;
use simplex::{Outcome, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Primal bound tolerance on the scaled problem.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance on the scaled problem.
    pub optimality_tol: f64,
    /// Smallest pivot element accepted by the ratio test.
    pub pivot_tol: f64,
    /// Defaults to `50 · (n_vars + n_rows)`.
    pub max_iterations: Option<usize>,
    pub presolve: bool,
    pub scaling: bool,
    pub refactor_interval: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations: None,
            presolve: true,
            scaling: true,
            refactor_interval: 100,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), LpError> {
        for (name, v) in [
            ("feasibility_tol", self.feasibility_tol),
            ("optimality_tol", self.optimality_tol),
            ("pivot_tol", self.pivot_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LpError::Options(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.refactor_interval == 0 {
            return Err(LpError::Options("refactor_interval must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: Status,
    /// Primal values; the last iterate unless `status` is `Optimal`.
    pub x: Vec<f64>,
    /// `cᵀx` on the original instance.
    pub objective_value: f64,
    /// Row duals `y` with `c − Aᵀy` the reduced costs. Empty unless optimal.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// For infeasible instances, rows that carry the infeasibility proof.
    pub infeasible_rows: Vec<usize>,
}

impl LpResult {
    fn new(lp: &LpInstance, status: Status, x: Vec<f64>, iterations: usize) -> Self {
        LpResult {
            status,
            objective_value: lp.objective_value(&x),
            x,
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
            infeasible_rows: Vec::new(),
        }
    }
}

fn reduced_costs(lp: &LpInstance, y: &[f64]) -> Vec<f64> {
    (0..lp.n_vars())
        .map(|j| {
            let (rows, vals) = lp.column(j);
            lp.objective()[j] - rows.iter().zip(vals).map(|(&i, &a)| a * y[i]).sum::<f64>()
        })
        .collect()
}

/// Solves `min cᵀx` subject to `A x = b`, `l ≤ x ≤ u`.
///
/// Results are deterministic: the same instance and options always give the
/// same iterates, bit for bit.
pub fn solve(lp: &LpInstance, options: &SolveOptions) -> Result<LpResult, LpError> {
    options.validate()?;
    let (reduced, map) = if options.presolve {
        match presolve(lp) {
            Presolve::Reduced(p) => {
                let p = *p;
                (p.reduced, Some(p.map))
            }
            Presolve::Infeasible { row } => {
                let x = lp.bounds().iter().map(|b| clamp_zero(*b)).collect();
                let mut res = LpResult::new(lp, Status::Infeasible, x, 0);
                res.infeasible_rows = vec![row];
                return Ok(res);
            }
        }
    } else {
        (lp.clone(), None)
    };

    let scaling = if options.scaling { Scaling::geometric(&reduced) } else { Scaling::identity(&reduced) };
    let scaled = scaling.apply(&reduced);
    let tol = Tolerances {
        feasibility: options.feasibility_tol,
        optimality: options.optimality_tol,
        pivot: options.pivot_tol,
    };
    let max_iter = options.max_iterations.unwrap_or(50 * (lp.n_vars() + lp.n_rows()).max(1));
    let engine = simplex::run(&scaled, tol, max_iter, options.refactor_interval);

    let x_reduced = scaling.unscale_primal(&engine.x);
    let x = match &map {
        Some(map) => map.restore_primal(&x_reduced),
        None => x_reduced,
    };
    let status = match engine.outcome {
        Outcome::Optimal => Status::Optimal,
        Outcome::Infeasible => Status::Infeasible,
        Outcome::Unbounded => Status::Unbounded,
        Outcome::IterationLimit => Status::IterationLimit,
    };
    let mut res = LpResult::new(lp, status, x, engine.iterations);
    let to_original_row = |i: usize| map.as_ref().map_or(i, |m| m.kept_rows()[i]);
    match status {
        Status::Optimal => {
            let y_reduced = scaling.unscale_duals(&engine.y);
            let y = match &map {
                Some(map) => map.restore_duals(lp, &y_reduced),
                None => y_reduced,
            };
            res.reduced_costs = reduced_costs(lp, &y);
            res.duals = y;
        }
        Status::Infeasible => {
            res.infeasible_rows = engine.infeasible_rows.iter().map(|&i| to_original_row(i)).collect();
        }
        _ => {}
    }
    Ok(res)
}

fn clamp_zero(b: Bounds) -> f64 {
    0.0f64.clamp(b.lower, b.upper)
}
