//! Pricing with differential rates: the BDSDE against its `g ≡ 0` BSDE
//! counterpart, on identical `W` samples, for each built-in noise term.
//!
//! ```text
//! cargo run --release --example finance_compare
//! ```

use bdsde::prelude::*;
use bdsde::solver::run_repetitions_in;

fn mean_y(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    seeds: &SeedPlan,
    n: usize,
) -> bdsde::Result<f64> {
    let x0 = problem.x0().to_vec();
    let values: Vec<Vec<f64>> = run_repetitions_in(problem, config, b_path, seeds, 0)?
        .into_iter()
        .map(|r| r.map(|s| s.y_at(n, &x0).to_vec()))
        .collect::<bdsde::Result<_>>()?;
    Ok(empirical_stats(&values)?.mean[0])
}

fn main() -> bdsde::Result<()> {
    let seeds = SeedPlan::new(2024);
    let params = FinanceParams::default();
    let config =
        SolverConfig::new(20, 1000, 1.0, Domain::fixed_1d(60.0, 200.0)).with_repetitions(20);
    let grid = make_grid(params.horizon, config.steps)?;
    let b_path = sample_b_path(seeds.b_seed(0), &grid, 1);

    println!(
        "{:<12} {:>4} {:>10} {:>10}",
        "problem", "n", "bsde", "bdsde"
    );
    for variant in [NoiseVariant::G1, NoiseVariant::G2, NoiseVariant::G3] {
        let problem = finance_problem(params, variant, [60.0, 200.0])?;
        let bsde = problem.without_noise();
        for n in [0, 15, 19] {
            let with = mean_y(&problem, &config, &b_path, &seeds, n)?;
            let without = mean_y(&bsde, &config, &b_path, &seeds, n)?;
            println!("{:<12} {n:>4} {without:>10.4} {with:>10.4}", problem.name());
        }
        if problem.diagnostics().log_clamps() > 0 {
            println!(
                "  log-domain clamps: {}",
                problem.diagnostics().log_clamps()
            );
        }
    }
    Ok(())
}
