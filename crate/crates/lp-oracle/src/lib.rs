//! Reference solver for tiny linear programs with finite bounds.
//!
//! Every vertex of `{x : A x = b, l ≤ x ≤ u}` is a point where each variable
//! is at its lower bound, at its upper bound, or in a set of "free" variables
//! whose columns are linearly independent and which are determined by the
//! equations. The oracle enumerates all `3ⁿ` such labelings, keeps the
//! feasible points and returns the cheapest. With finite bounds the feasible
//! set is a polytope, so an empty vertex list means the instance is
//! infeasible.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Dense equality-form instance. All bounds must be finite.
#[derive(Debug, Clone)]
pub struct DenseLp {
    /// Row-major constraint matrix, `a[i][j]`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
}

const RANK_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
enum Label {
    Lower,
    Upper,
    Free,
}

pub fn solve_by_enumeration(lp: &DenseLp) -> OracleOutcome {
    let n = lp.c.len();
    let m = lp.b.len();
    assert!(n <= 12, "enumeration is exponential in the number of variables");
    assert!(lp.lower.iter().chain(&lp.upper).all(|v| v.is_finite()), "bounds must be finite");
    let scale = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut labels = vec![Label::Lower; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut k = code;
        for l in labels.iter_mut() {
            *l = match k % 3 {
                0 => Label::Lower,
                1 => Label::Upper,
                _ => Label::Free,
            };
            k /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&j| labels[j] == Label::Free).collect();
        if free.len() > m {
            continue;
        }
        let mut x: Vec<f64> = (0..n)
            .map(|j| match labels[j] {
                Label::Lower => lp.lower[j],
                Label::Upper => lp.upper[j],
                Label::Free => 0.0,
            })
            .collect();
        let rhs = DVector::from_fn(m, |i, _| {
            lp.b[i] - (0..n).filter(|&j| labels[j] != Label::Free).map(|j| lp.a[i][j] * x[j]).sum::<f64>()
        });
        if !free.is_empty() {
            let ab = DMatrix::from_fn(m, free.len(), |i, k| lp.a[i][free[k]]);
            let svd = ab.clone().svd(true, true);
            let smax = svd.singular_values.max();
            if svd.rank(RANK_TOL * smax.max(1.0)) < free.len() {
                continue;
            }
            let Ok(sol) = svd.solve(&rhs, RANK_TOL * smax.max(1.0)) else { continue };
            for (k, &j) in free.iter().enumerate() {
                x[j] = sol[k];
            }
            let resid = &ab * &sol - &rhs;
            if resid.amax() > FEAS_TOL * scale {
                continue;
            }
        } else if rhs.amax() > FEAS_TOL * scale {
            continue;
        }
        let in_bounds = (0..n).all(|j| {
            let t = FEAS_TOL * (1.0 + x[j].abs());
            x[j] >= lp.lower[j] - t && x[j] <= lp.upper[j] + t
        });
        if !in_bounds {
            continue;
        }
        let obj: f64 = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    match best {
        Some((objective, x)) => OracleOutcome::Optimal { objective, x },
        None => OracleOutcome::Infeasible,
    }
}

/// Small-integer instance with up to `max_vars` variables and `max_rows` rows.
///
/// Half of the instances get a right-hand side generated from a point inside
/// the bounds, so they are feasible; the rest are usually infeasible once
/// there are more rows than free directions.
pub fn random_instance<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> DenseLp {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(1..=max_rows);
    let mut a = vec![vec![0.0; n]; m];
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            if rng.random_bool(0.6) {
                *v = rng.random_range(-3i32..=3) as f64;
            }
        }
    }
    let c = (0..n).map(|_| rng.random_range(-5i32..=5) as f64).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-3i32..=0) as f64).collect();
    let upper: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0i32..=5) as f64).collect();
    let b = if rng.random_bool(0.5) {
        let x0: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| rng.random_range(*l..=*u)).collect();
        a.iter().map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect()
    } else {
        (0..m).map(|_| rng.random_range(-5i32..=5) as f64).collect()
    };
    DenseLp { a, b, c, lower, upper }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_box_corner() {
        // min -x0 - 2 x1, x0 + x1 + s = 3, boxes [0,2], [0,2], [0,10]
        let lp = DenseLp {
            a: vec![vec![1.0, 1.0, 1.0]],
            b: vec![3.0],
            c: vec![-1.0, -2.0, 0.0],
            lower: vec![0.0; 3],
            upper: vec![2.0, 2.0, 10.0],
        };
        match solve_by_enumeration(&lp) {
            OracleOutcome::Optimal { objective, x } => {
                assert!((objective + 5.0).abs() < 1e-12);
                assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasibility() {
        let lp = DenseLp {
            a: vec![vec![1.0, 1.0]],
            b: vec![5.0],
            c: vec![1.0, 1.0],
            lower: vec![0.0; 2],
            upper: vec![2.0, 2.0],
        };
        assert_eq!(solve_by_enumeration(&lp), OracleOutcome::Infeasible);
    }
}
