//! Removal of fixed variables, empty rows and singleton rows.
//!
//! Singleton rows fix their only variable, which may in turn empty or
//! singleton other rows; the reductions are applied until nothing changes.

use crate::instance::{Bounds, LpInstance};

const ZERO_TOL: f64 = 1e-9;

/// Result of presolving an instance.
#[derive(Debug, Clone)]
pub enum Presolve {
    Reduced(Box<Presolved>),
    /// An empty row with non-zero right-hand side, or a singleton row whose
    /// implied value violates the variable bounds. `row` is an original index.
    Infeasible { row: usize },
}

#[derive(Debug, Clone)]
pub struct Presolved {
    pub reduced: LpInstance,
    pub map: PostsolveMap,
}

/// Back-map from a reduced solution to the original variable and row spaces.
#[derive(Debug, Clone)]
pub struct PostsolveMap {
    n_vars: usize,
    n_rows: usize,
    kept_vars: Vec<usize>,
    kept_rows: Vec<usize>,
    fixed: Vec<Option<f64>>,
    /// `(row, var, coefficient)` in removal order.
    singletons: Vec<(usize, usize, f64)>,
    objective_offset: f64,
}

impl PostsolveMap {
    pub fn kept_vars(&self) -> &[usize] {
        &self.kept_vars
    }

    pub fn kept_rows(&self) -> &[usize] {
        &self.kept_rows
    }

    /// Objective contribution of the removed variables.
    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn restore_primal(&self, x_reduced: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
        for (k, &j) in self.kept_vars.iter().enumerate() {
            x[j] = x_reduced[k];
        }
        x
    }

    /// Row duals in the original space. Rows removed as singletons receive the
    /// dual that zeroes the reduced cost of the variable they fixed.
    pub fn restore_duals(&self, original: &LpInstance, y_reduced: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        for (k, &i) in self.kept_rows.iter().enumerate() {
            y[i] = y_reduced[k];
        }
        for &(row, var, coef) in self.singletons.iter().rev() {
            let (rows, vals) = original.column(var);
            let mut acc = original.objective()[var];
            for (&i, &a) in rows.iter().zip(vals) {
                if i != row {
                    acc -= a * y[i];
                }
            }
            y[row] = acc / coef;
        }
        y
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }
}

pub fn presolve(lp: &LpInstance) -> Presolve {
    let n = lp.n_vars();
    let m = lp.n_rows();

    let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (i, j, v) in lp.triplets() {
        row_entries[i].push((j, v));
    }
    let mut row_count: Vec<usize> = row_entries.iter().map(Vec::len).collect();
    let mut row_alive = vec![true; m];
    let mut rhs = lp.rhs().to_vec();
    let scale: Vec<f64> = lp.rhs().iter().map(|b| 1.0 + b.abs()).collect();

    let mut fixed: Vec<Option<f64>> = vec![None; n];
    let mut singletons = Vec::new();
    let mut worklist: Vec<usize> = Vec::new();

    let fix = |j: usize,
               value: f64,
               fixed: &mut Vec<Option<f64>>,
               rhs: &mut Vec<f64>,
               row_count: &mut Vec<usize>,
               row_alive: &[bool],
               worklist: &mut Vec<usize>| {
        fixed[j] = Some(value);
        let (rows, vals) = lp.column(j);
        for (&i, &a) in rows.iter().zip(vals) {
            if !row_alive[i] {
                continue;
            }
            rhs[i] -= a * value;
            row_count[i] -= 1;
            if row_count[i] <= 1 {
                worklist.push(i);
            }
        }
    };

    for (j, b) in lp.bounds().iter().enumerate() {
        if b.is_fixed() {
            fix(j, b.lower, &mut fixed, &mut rhs, &mut row_count, &row_alive, &mut worklist);
        }
    }
    for i in 0..m {
        if row_count[i] <= 1 {
            worklist.push(i);
        }
    }

    while let Some(i) = worklist.pop() {
        if !row_alive[i] {
            continue;
        }
        match row_count[i] {
            0 => {
                if rhs[i].abs() > ZERO_TOL * scale[i] {
                    return Presolve::Infeasible { row: i };
                }
                row_alive[i] = false;
            }
            1 => {
                let &(j, a) = row_entries[i]
                    .iter()
                    .find(|(j, _)| fixed[*j].is_none())
                    .expect("singleton row has one free entry");
                let b = lp.bounds()[j];
                let mut value = rhs[i] / a;
                let tol = ZERO_TOL * (1.0 + value.abs());
                if !b.contains(value, tol) {
                    return Presolve::Infeasible { row: i };
                }
                value = value.clamp(b.lower, b.upper);
                row_alive[i] = false;
                singletons.push((i, j, a));
                fix(j, value, &mut fixed, &mut rhs, &mut row_count, &row_alive, &mut worklist);
            }
            _ => {}
        }
    }

    let kept_vars: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    let kept_rows: Vec<usize> = (0..m).filter(|&i| row_alive[i]).collect();
    let mut new_col = vec![usize::MAX; n];
    for (k, &j) in kept_vars.iter().enumerate() {
        new_col[j] = k;
    }
    let mut new_row = vec![usize::MAX; m];
    for (k, &i) in kept_rows.iter().enumerate() {
        new_row[i] = k;
    }

    let objective_offset: f64 = fixed
        .iter()
        .zip(lp.objective())
        .filter_map(|(f, c)| f.map(|v| v * c))
        .sum();
    let objective: Vec<(usize, f64)> =
        kept_vars.iter().enumerate().map(|(k, &j)| (k, lp.objective()[j])).collect();
    let triplets: Vec<(usize, usize, f64)> = lp
        .triplets()
        .filter(|&(i, j, _)| row_alive[i] && fixed[j].is_none())
        .map(|(i, j, v)| (new_row[i], new_col[j], v))
        .collect();
    let reduced_rhs: Vec<f64> = kept_rows.iter().map(|&i| rhs[i]).collect();
    let bounds: Vec<Bounds> = kept_vars.iter().map(|&j| lp.bounds()[j]).collect();

    let reduced = LpInstance::new(kept_vars.len(), kept_rows.len(), &objective, &triplets, reduced_rhs, bounds)
        .expect("reduced instance inherits validity");

    Presolve::Reduced(Box::new(Presolved {
        reduced,
        map: PostsolveMap { n_vars: n, n_rows: m, kept_vars, kept_rows, fixed, singletons, objective_offset },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduced(p: Presolve) -> Presolved {
        match p {
            Presolve::Reduced(p) => *p,
            Presolve::Infeasible { row } => panic!("unexpected infeasible row {row}"),
        }
    }

    #[test]
    fn fixed_variable_is_substituted_out() {
        // x0 fixed at 3; x0 + x1 + x2 = 5
        let lp = LpInstance::new(
            3,
            1,
            &[(0, 2.0), (1, 1.0)],
            &[(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0)],
            vec![5.0],
            vec![Bounds::fixed(3.0), Bounds::NON_NEGATIVE, Bounds::NON_NEGATIVE],
        )
        .unwrap();
        let p = reduced(presolve(&lp));
        assert_eq!(p.reduced.n_vars(), 2);
        assert_eq!(p.reduced.rhs(), &[2.0]);
        assert_eq!(p.map.objective_offset(), 6.0);
        assert_eq!(p.map.restore_primal(&[1.5, 0.5]), vec![3.0, 1.5, 0.5]);
    }

    #[test]
    fn empty_row_with_zero_rhs_is_dropped() {
        let lp = LpInstance::new(
            2,
            2,
            &[],
            &[(0, 0, 1.0), (0, 1, 1.0)],
            vec![1.0, 0.0],
            vec![Bounds::NON_NEGATIVE; 2],
        )
        .unwrap();
        let p = reduced(presolve(&lp));
        assert_eq!(p.reduced.n_rows(), 1);
        assert_eq!(p.map.kept_rows(), &[0]);
    }

    #[test]
    fn empty_row_with_nonzero_rhs_is_infeasible() {
        let lp = LpInstance::new(1, 2, &[], &[(0, 0, 1.0)], vec![1.0, 1.0], vec![Bounds::NON_NEGATIVE]).unwrap();
        assert!(matches!(presolve(&lp), Presolve::Infeasible { row: 1 }));
    }

    #[test]
    fn singleton_rows_cascade() {
        // 2 x0 = 4 fixes x0 = 2; then x0 + x1 = 5 fixes x1 = 3; x1 + x2 + x3 = 4 stays.
        let lp = LpInstance::new(
            4,
            3,
            &[(0, 1.0), (1, 1.0), (2, 1.0)],
            &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0), (2, 2, 1.0), (2, 3, 1.0)],
            vec![4.0, 5.0, 4.0],
            vec![Bounds::NON_NEGATIVE; 4],
        )
        .unwrap();
        let p = reduced(presolve(&lp));
        assert_eq!(p.map.kept_vars(), &[2, 3]);
        assert_eq!(p.map.kept_rows(), &[2]);
        assert_eq!(p.reduced.rhs(), &[1.0]);
        let x = p.map.restore_primal(&[1.0, 0.0]);
        assert_eq!(x, vec![2.0, 3.0, 1.0, 0.0]);
        // With y2 = 1 (x2 basic), the singleton duals zero the reduced costs of x1 and x0.
        let y = p.map.restore_duals(&lp, &[1.0]);
        assert_eq!(y[2], 1.0);
        assert_eq!(y[1], 0.0); // c1 - y2 = 0
        assert_eq!(y[0], 0.5); // (c0 - y1) / 2
    }

    #[test]
    fn singleton_row_outside_bounds_is_infeasible() {
        let lp = LpInstance::new(1, 1, &[], &[(0, 0, 1.0)], vec![-1.0], vec![Bounds::NON_NEGATIVE]).unwrap();
        assert!(matches!(presolve(&lp), Presolve::Infeasible { row: 0 }));
    }
}
