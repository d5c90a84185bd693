//! The bounded-variable simplex on a small dispatch problem.
//!
//! Three sources with capacity limits feed a fixed demand; the cheapest mix
//! wins (costs enter as negative objective weights since the solver
//! maximizes).

use hippp::lp::{solve, LinearProgram, LpStatus};

fn main() -> hippp::Result<()> {
    let costs = [3.0, 1.0, 2.0];
    let limits = [4.0, 2.5, 3.0];
    let demand = 6.0;

    let mut lp = LinearProgram::new(3);
    for (k, (&c, &cap)) in costs.iter().zip(&limits).enumerate() {
        lp.set_objective(k, -c).set_bounds(k, 0.0, cap);
    }
    lp.add_equality(&[(0, 1.0), (1, 1.0), (2, 1.0)], demand);

    let sol = solve(&lp)?;
    assert_eq!(sol.status, LpStatus::Optimal);
    for (k, x) in sol.values.iter().enumerate() {
        println!("source {k}: {x:.3} of {}", limits[k]);
    }
    println!("cost {:.3}", -sol.objective_value);

    lp.add_equality(&[(0, 1.0)], 10.0);
    println!("with source 0 forced to 10: {:?}", solve(&lp)?.status);
    Ok(())
}
