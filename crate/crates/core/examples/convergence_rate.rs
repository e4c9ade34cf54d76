//! Error of the linear case along the refinement schedule, with every
//! setting's `B` obtained by coarsening one path on the common fine grid.
//!
//! ```text
//! cargo run --release --example convergence_rate -- [j_max] [repetitions]
//! ```

use bdsde::analytics::common_refinement;
use bdsde::prelude::*;
use bdsde::solver::solve_repetition;

fn main() -> bdsde::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let j_max = args.next().flatten().unwrap_or(6);
    let reps = args.next().flatten().unwrap_or(20);

    let params = LinearParams::default();
    let problem = linear_problem(params)?;
    let seeds = SeedPlan::new(2024);
    let plan = default_schedule(j_max);
    let fine = make_grid(
        params.horizon,
        common_refinement(plan.iter().map(|e| e.steps)),
    )?;
    let b_fine = sample_b_path(seeds.b_seed(0), &fine, 1);

    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    println!(
        "{:>2} {:>3} {:>4} {:>8} {:>10}",
        "j", "N", "M", "delta", "error"
    );
    for entry in &plan {
        let config = SolverConfig::new(
            entry.steps,
            entry.samples,
            entry.delta,
            Domain::fixed_1d(40.0, 180.0),
        );
        let mut total = 0.0;
        for rep in 0..reps {
            let (batch, solution) =
                solve_repetition(&problem, &config, &b_fine, &seeds, entry.j as u64, rep)?;
            total += error_vs_oracle(&solution, &batch, &b_fine, &params)?.total;
        }
        let err = total / reps as f64;
        let h = params.horizon / entry.steps as f64;
        println!(
            "{:>2} {:>3} {:>4} {:>8.3} {err:>10.4}",
            entry.j, entry.steps, entry.samples, entry.delta
        );
        hs.push(h);
        errs.push(err);
    }
    println!(
        "log-log slope of error against h: {:.3}",
        loglog_slope(&hs, &errs)?
    );
    Ok(())
}
