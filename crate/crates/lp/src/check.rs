use crate::instance::LpInstance;

/// Independent audit of a primal-dual pair against the original instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCheck {
    /// `max_i |(A x − b)_i|`.
    pub max_residual: f64,
    /// Largest distance of any `x_j` outside `[l_j, u_j]`.
    pub max_bound_violation: f64,
    /// Largest reduced cost with the wrong sign for an infinite bound.
    pub max_dual_infeasibility: f64,
    pub primal_objective: f64,
    /// `bᵀy + Σ_j min over the bound box of d_j x_j`, finite bounds only.
    pub dual_objective: f64,
}

impl SolutionCheck {
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }
}

pub fn check_solution(lp: &LpInstance, x: &[f64], y: &[f64]) -> SolutionCheck {
    let ax = lp.row_activity(x);
    let max_residual = ax.iter().zip(lp.rhs()).fold(0.0f64, |a, (ax, b)| a.max((ax - b).abs()));
    let max_bound_violation = x.iter().zip(lp.bounds()).fold(0.0f64, |a, (&x, b)| {
        a.max(b.lower - x).max(x - b.upper)
    });
    let mut dual_objective: f64 = lp.rhs().iter().zip(y).map(|(b, y)| b * y).sum();
    let mut max_dual_infeasibility = 0.0f64;
    for j in 0..lp.n_vars() {
        let (rows, vals) = lp.column(j);
        let mut d = lp.objective()[j];
        for (&i, &a) in rows.iter().zip(vals) {
            d -= a * y[i];
        }
        let b = lp.bounds()[j];
        let bound = if d > 0.0 { b.lower } else { b.upper };
        if d == 0.0 {
            continue;
        }
        if bound.is_finite() {
            dual_objective += d * bound;
        } else {
            max_dual_infeasibility = max_dual_infeasibility.max(d.abs());
        }
    }
    SolutionCheck {
        max_residual,
        max_bound_violation,
        max_dual_infeasibility,
        primal_objective: lp.objective_value(x),
        dual_objective,
    }
}
