use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_simplex::{check_solution, read_mps, solve, write_mps, Bounds, LpBuilder, LpInstance, SolveOptions, Status};

fn opts() -> SolveOptions {
    SolveOptions::default()
}

#[test]
fn bound_active_maximum() {
    let mut b = LpBuilder::new();
    b.add_var(Bounds::new(0.0, 5.0), -1.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Optimal);
    assert_eq!(res.x, vec![5.0]);
    assert_eq!(res.objective_value, -5.0);
}

#[test]
fn equality_forces_objective() {
    let mut b = LpBuilder::new();
    let x1 = b.add_var(Bounds::NON_NEGATIVE, 1.0);
    let x2 = b.add_var(Bounds::NON_NEGATIVE, 1.0);
    b.add_row(&[(x1, 1.0), (x2, 1.0)], 1.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Optimal);
    assert!((res.objective_value - 1.0).abs() < 1e-12);
}

#[test]
fn contradictory_equalities_are_infeasible() {
    let mut b = LpBuilder::new();
    let x = b.add_var(Bounds::FREE, 0.0);
    b.add_row(&[(x, 1.0)], 1.0);
    b.add_row(&[(x, 1.0)], 0.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Infeasible);
    assert!(!res.infeasible_rows.is_empty());
}

#[test]
fn contradictory_equalities_are_infeasible_without_presolve() {
    let mut b = LpBuilder::new();
    let x = b.add_var(Bounds::FREE, 0.0);
    b.add_row(&[(x, 1.0)], 1.0);
    b.add_row(&[(x, 1.0)], 0.0);
    let options = SolveOptions { presolve: false, ..opts() };
    let res = solve(&b.build().unwrap(), &options).unwrap();
    assert_eq!(res.status, Status::Infeasible);
    assert_eq!(res.infeasible_rows.len(), 2);
}

#[test]
fn empty_row_with_nonzero_rhs_short_circuits() {
    let mut b = LpBuilder::new();
    b.add_var(Bounds::NON_NEGATIVE, 1.0);
    b.add_row(&[], 1.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Infeasible);
    assert_eq!(res.infeasible_rows, vec![0]);
    assert_eq!(res.iterations, 0);
}

#[test]
fn unbounded_ray_is_detected() {
    // min -x0 with x0 - x1 = 1, both non-negative.
    let mut b = LpBuilder::new();
    let x0 = b.add_var(Bounds::NON_NEGATIVE, -1.0);
    let x1 = b.add_var(Bounds::NON_NEGATIVE, 0.0);
    b.add_row(&[(x0, 1.0), (x1, -1.0)], 1.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Unbounded);
}

#[test]
fn free_variables_and_negative_bounds() {
    // min x0 + 2 x1, x0 - x1 = -3, x0 free, x1 in [-2, 4] -> x1 = -2, x0 = -5, obj -9.
    let mut b = LpBuilder::new();
    let x0 = b.add_var(Bounds::FREE, 1.0);
    let x1 = b.add_var(Bounds::new(-2.0, 4.0), 2.0);
    b.add_row(&[(x0, 1.0), (x1, -1.0)], -3.0);
    let res = solve(&b.build().unwrap(), &opts()).unwrap();
    assert_eq!(res.status, Status::Optimal);
    assert!((res.objective_value + 9.0).abs() < 1e-12);
}

#[test]
fn iteration_limit_is_reported() {
    let lp = transportation(8, 8, 3);
    let options = SolveOptions { max_iterations: Some(2), ..opts() };
    let res = solve(&lp, &options).unwrap();
    assert_eq!(res.status, Status::IterationLimit);
}

#[test]
fn rejects_invalid_options() {
    let lp = transportation(2, 2, 1);
    let options = SolveOptions { feasibility_tol: -1.0, ..opts() };
    assert!(solve(&lp, &options).is_err());
}

/// Balanced transportation problem: highly degenerate, integral optimum.
fn transportation(sources: usize, sinks: usize, seed: u64) -> LpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let supply = vec![sinks as f64 * 10.0; sources];
    let demand = vec![sources as f64 * 10.0; sinks];
    let mut b = LpBuilder::new();
    let mut vars = vec![vec![0; sinks]; sources];
    for row in vars.iter_mut() {
        for v in row.iter_mut() {
            *v = b.add_var(Bounds::NON_NEGATIVE, rng.random_range(1..20) as f64);
        }
    }
    for (s, row) in vars.iter().enumerate() {
        let coeffs: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
        b.add_row(&coeffs, supply[s]);
    }
    for t in 0..sinks {
        let coeffs: Vec<_> = vars.iter().map(|row| (row[t], 1.0)).collect();
        b.add_row(&coeffs, demand[t]);
    }
    b.build().unwrap()
}

#[test]
fn degenerate_transportation_problems_satisfy_kkt() {
    for seed in 0..20 {
        let lp = transportation(6 + seed as usize % 5, 7, seed);
        let res = solve(&lp, &opts()).unwrap();
        assert_eq!(res.status, Status::Optimal);
        let c = check_solution(&lp, &res.x, &res.duals);
        assert!(c.max_residual < 1e-8 && c.max_bound_violation < 1e-9);
        assert!(c.max_dual_infeasibility < 1e-8);
        assert!(c.gap() < 1e-6 * (1.0 + c.primal_objective.abs()), "gap {}", c.gap());
        // Integral data and a totally unimodular matrix give an integral vertex.
        for x in &res.x {
            assert!((x - x.round()).abs() < 1e-7);
        }
    }
}

/// Random sparse feasible instance with mixed bounds and badly scaled rows.
fn random_sparse(n: usize, m: usize, seed: u64) -> LpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bounds = Vec::with_capacity(n);
    let mut x0 = Vec::with_capacity(n);
    for _ in 0..n {
        let kind = rng.random_range(0..4);
        let l = rng.random_range(-5.0..0.0);
        let u = l + rng.random_range(0.5..10.0);
        let b = match kind {
            0 => Bounds::new(l, u),
            1 => Bounds::new(l, f64::INFINITY),
            2 => Bounds::new(f64::NEG_INFINITY, u),
            _ => Bounds::new(l, u),
        };
        x0.push(rng.random_range(l..u));
        bounds.push(b);
    }
    let mut triplets = Vec::new();
    let row_scale: Vec<f64> = (0..m).map(|_| 10f64.powi(rng.random_range(-3..4))).collect();
    for i in 0..m {
        for _ in 0..4 {
            let j = rng.random_range(0..n);
            triplets.push((i, j, row_scale[i] * rng.random_range(-2.0..2.0)));
        }
    }
    let probe = LpInstance::new(n, m, &[], &triplets, vec![0.0; m], bounds.clone()).unwrap();
    let rhs = probe.row_activity(&x0);
    // Costs that keep the problem bounded: push one-sided variables towards their finite bound.
    let objective: Vec<(usize, f64)> = bounds
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let c: f64 = rng.random_range(0.1..3.0);
            let c = match (b.lower.is_finite(), b.upper.is_finite()) {
                (true, false) => c,
                (false, true) => -c,
                _ => c * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            };
            (j, c)
        })
        .collect();
    LpInstance::new(n, m, &objective, &triplets, rhs, bounds).unwrap()
}

#[test]
fn medium_random_instances_satisfy_kkt() {
    for seed in 0..10 {
        let lp = random_sparse(300, 150, seed);
        let res = solve(&lp, &opts()).unwrap();
        assert_eq!(res.status, Status::Optimal, "seed {seed}");
        let c = check_solution(&lp, &res.x, &res.duals);
        assert!(c.max_residual < 1e-6, "seed {seed}: residual {}", c.max_residual);
        assert!(c.max_bound_violation < 1e-6, "seed {seed}");
        assert!(c.max_dual_infeasibility < 1e-6, "seed {seed}");
        assert!(c.gap() < 1e-6 * (1.0 + c.primal_objective.abs()), "seed {seed}: gap {}", c.gap());
    }
}

#[test]
fn mps_round_trip_solves_identically() {
    let lp = random_sparse(40, 20, 11);
    let text = write_mps(&lp, "RANDOM");
    let back = read_mps(&text).unwrap();
    assert_eq!(back, lp);
    let a = solve(&lp, &opts()).unwrap();
    let b = solve(&back, &opts()).unwrap();
    assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
}

#[test]
fn perturbed_solution_is_flagged_by_check() {
    let mut b = LpBuilder::new();
    let x = b.add_var(Bounds::new(0.0, 5.0), -1.0);
    let s = b.add_var(Bounds::NON_NEGATIVE, 0.0);
    b.add_row(&[(x, 1.0), (s, 1.0)], 5.0);
    let lp = b.build().unwrap();
    let res = solve(&lp, &opts()).unwrap();
    let mut x_bad = res.x.clone();
    x_bad[0] += 1.0;
    let c = check_solution(&lp, &x_bad, &res.duals);
    assert_eq!(c.max_bound_violation, 1.0);
    assert_eq!(c.max_residual, 1.0);
}
