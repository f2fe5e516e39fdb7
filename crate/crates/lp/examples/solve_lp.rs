//! A small transportation problem: build, solve, audit, and round-trip
//! through MPS. Then an infeasible variant and the rows behind it.

use sparse_simplex::{check_solution, read_mps, solve, write_mps, Bounds, LpBuilder, LpInstance, SolveOptions};

const SUPPLY: [f64; 2] = [350.0, 600.0];
const DEMAND: [f64; 3] = [325.0, 300.0, 275.0];
const COST: [[f64; 3]; 2] = [[2.5, 1.7, 1.8], [2.5, 1.8, 1.4]];

/// Shipments `x[p][m]`, plus one slack per plant for unused supply.
fn transport(demand: &[f64; 3]) -> LpInstance {
    let mut b = LpBuilder::new();
    let ship: Vec<Vec<usize>> =
        (0..2).map(|p| (0..3).map(|m| b.add_var(Bounds::new(0.0, 400.0), COST[p][m])).collect()).collect();
    for p in 0..2 {
        let slack = b.add_var(Bounds::NON_NEGATIVE, 0.0);
        let mut row: Vec<(usize, f64)> = ship[p].iter().map(|&j| (j, 1.0)).collect();
        row.push((slack, 1.0));
        b.add_row(&row, SUPPLY[p]);
    }
    for m in 0..3 {
        b.add_row(&[(ship[0][m], 1.0), (ship[1][m], 1.0)], demand[m]);
    }
    b.build().expect("well-formed instance")
}

fn main() {
    let lp = transport(&DEMAND);
    let res = solve(&lp, &SolveOptions::default()).expect("solver accepts the instance");
    println!("status {} after {} iterations, cost {:.3}", res.status, res.iterations, res.objective_value);
    for p in 0..2 {
        let row: Vec<String> = (0..3).map(|m| format!("{:>7.1}", res.x[p * 3 + m])).collect();
        println!("plant {p}: {}", row.join(" "));
    }
    let check = check_solution(&lp, &res.x, &res.duals);
    println!(
        "audit: residual {:.1e}, bound violation {:.1e}, duality gap {:.1e}",
        check.max_residual,
        check.max_bound_violation,
        check.gap()
    );

    let text = write_mps(&lp, "TRANSPORT");
    let again = read_mps(&text).expect("own MPS output parses");
    let res2 = solve(&again, &SolveOptions::default()).expect("solver accepts the instance");
    println!("after MPS round trip: cost {:.3}", res2.objective_value);

    // More demand than the plants can supply.
    let short = transport(&[500.0, 300.0, 275.0]);
    let res = solve(&short, &SolveOptions::default()).expect("solver accepts the instance");
    println!("raised demand: {} (rows {:?})", res.status, res.infeasible_rows);
}
