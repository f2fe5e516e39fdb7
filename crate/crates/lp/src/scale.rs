//! Geometric row and column scaling by powers of two.
//!
//! Powers of two keep the scaled coefficients exact, so unscaling a solution
//! introduces no rounding of its own.

use crate::instance::{Bounds, LpInstance};

const PASSES: usize = 6;

#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
    pub objective: f64,
}

fn pow2(v: f64) -> f64 {
    if v.is_finite() && v > 0.0 {
        2f64.powi(v.log2().round() as i32)
    } else {
        1.0
    }
}

impl Scaling {
    pub fn identity(lp: &LpInstance) -> Self {
        Scaling { row: vec![1.0; lp.n_rows()], col: vec![1.0; lp.n_vars()], objective: 1.0 }
    }

    pub fn geometric(lp: &LpInstance) -> Self {
        let (m, n) = (lp.n_rows(), lp.n_vars());
        let mut row = vec![1.0; m];
        let mut col = vec![1.0; n];
        for _ in 0..PASSES {
            let mut rmin = vec![f64::INFINITY; m];
            let mut rmax = vec![0.0f64; m];
            for (i, j, v) in lp.triplets() {
                let a = (v * col[j]).abs();
                rmin[i] = rmin[i].min(a);
                rmax[i] = rmax[i].max(a);
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row[i] = pow2(1.0 / (rmin[i] * rmax[i]).sqrt());
                }
            }
            for (j, c) in col.iter_mut().enumerate() {
                let (rows, vals) = lp.column(j);
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for (&i, &v) in rows.iter().zip(vals) {
                    let a = (v * row[i]).abs();
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
                if hi > 0.0 {
                    *c = pow2(1.0 / (lo * hi).sqrt());
                }
            }
        }
        let cmax = lp.objective().iter().zip(&col).fold(0.0f64, |a, (c, s)| a.max((c * s).abs()));
        let objective = if cmax > 0.0 { pow2(1.0 / cmax) } else { 1.0 };
        Scaling { row, col, objective }
    }

    pub fn apply(&self, lp: &LpInstance) -> LpInstance {
        let objective: Vec<(usize, f64)> = lp
            .objective()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, &c)| (j, c * self.col[j] * self.objective))
            .collect();
        let triplets: Vec<(usize, usize, f64)> =
            lp.triplets().map(|(i, j, v)| (i, j, v * self.row[i] * self.col[j])).collect();
        let rhs = lp.rhs().iter().zip(&self.row).map(|(b, r)| b * r).collect();
        let bounds = lp
            .bounds()
            .iter()
            .zip(&self.col)
            .map(|(b, s)| Bounds::new(b.lower / s, b.upper / s))
            .collect();
        LpInstance::new(lp.n_vars(), lp.n_rows(), &objective, &triplets, rhs, bounds)
            .expect("scaling preserves validity")
    }

    pub fn unscale_primal(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.col).map(|(x, s)| x * s).collect()
    }

    pub fn unscale_duals(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.row).map(|(y, r)| y * r / self.objective).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_are_powers_of_two_and_round_trip() {
        let lp = LpInstance::new(
            2,
            2,
            &[(0, 3000.0), (1, 0.5)],
            &[(0, 0, 1000.0), (0, 1, 0.001), (1, 0, 4.0), (1, 1, 8.0)],
            vec![10.0, 3.0],
            vec![Bounds::new(0.0, 5.0), Bounds::NON_NEGATIVE],
        )
        .unwrap();
        let s = Scaling::geometric(&lp);
        for f in s.row.iter().chain(&s.col).chain(std::iter::once(&s.objective)) {
            assert_eq!(f.log2().fract(), 0.0);
        }
        let scaled = s.apply(&lp);
        let x_scaled = [0.25, 1.5];
        let x = s.unscale_primal(&x_scaled);
        let ax = lp.row_activity(&x);
        let ax_scaled = scaled.row_activity(&x_scaled);
        for i in 0..2 {
            assert!((ax[i] * s.row[i] - ax_scaled[i]).abs() < 1e-12);
        }
    }
}
