//! A user-defined two-dimensional problem built from closures.
//!
//! Two independent geometric Brownian motions, a basket put payoff, a
//! Lipschitz driver and a scalar noise term depending on `y`.
//!
//! ```text
//! cargo run --release --example custom_problem
//! ```

use bdsde::prelude::*;

fn main() -> bdsde::Result<()> {
    let dims = Dims { d: 2, k: 1, l: 1 };
    let spec = CustomSpec::zero(dims, vec![100.0, 100.0], 0.25)
        .name("basket-put")
        .drift(|x| vec![0.05 * x[0], 0.05 * x[1]])
        .diffusion(|x| vec![0.2 * x[0], 0.0, 0.0, 0.3 * x[1]])
        .driver(|_, _, y, _| vec![-0.02 * y[0]])
        .noise(|_, _, y, _| vec![0.1 * y[0]])
        .terminal(|x| vec![(110.0 - 0.5 * (x[0] + x[1])).max(0.0)])
        .contraction(0.01);
    let problem = custom_problem(spec)?;
    println!("{} conforming: {}", problem.name(), problem.is_conforming());

    let seeds = SeedPlan::new(9);
    let config = SolverConfig::new(10, 4000, 5.0, Domain::DataDriven).with_repetitions(10);
    let grid = make_grid(problem.horizon(), config.steps)?;
    let b_path = sample_b_path(seeds.b_seed(0), &grid, 1);
    let y0: Vec<Vec<f64>> = run_repetitions(&problem, &config, &b_path, 9)?
        .into_iter()
        .map(|r| r.map(|s| s.y0))
        .collect::<bdsde::Result<_>>()?;
    let stats = empirical_stats(&y0)?;
    println!(
        "y0 mean {:.4}, std {:.4}",
        stats.mean[0],
        stats.std.map_or(f64::NAN, |s| s[0])
    );
    Ok(())
}
