//! Linear BDSDE against its closed-form solution for one fixed `B` path.
//!
//! ```text
//! cargo run --release --example linear_case -- [master_seed]
//! ```

use bdsde::prelude::*;

fn main() -> bdsde::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2024);
    let params = LinearParams::default();
    let problem = linear_problem(params)?;
    let grid = make_grid(problem.horizon(), 20)?;
    let b_path = sample_b_path(SeedPlan::new(seed).b_seed(0), &grid, 1);
    let oracle = explicit_linear_y(0, params.x0, &b_path, &params);
    println!(
        "B_T = {:.6}, closed-form Y_0 = {oracle:.6}",
        b_path.terminal()[0]
    );

    for samples in [1000, 5000] {
        let config = SolverConfig::new(20, samples, 1.0, Domain::fixed_1d(60.0, 200.0));
        let y0: Vec<Vec<f64>> = run_repetitions(&problem, &config, &b_path, seed)?
            .into_iter()
            .map(|r| r.map(|s| s.y0))
            .collect::<bdsde::Result<_>>()?;
        let stats = empirical_stats(&y0)?;
        let std = stats.std.as_ref().map_or(f64::NAN, |s| s[0]);
        println!(
            "M = {samples:>5}: mean {:.4}  std {:.4}  rel. error {:.4}",
            stats.mean[0],
            std,
            (stats.mean[0] - oracle).abs() / oracle
        );
    }
    Ok(())
}
