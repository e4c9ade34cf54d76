//! Solves once and writes the fitted `y_n`, `z_n` cell values to a CSV, then
//! prints the fitted field next to the closed form at a few points.
//!
//! ```text
//! cargo run --release --example field_export -- [out.csv]
//! ```

use bdsde::export::field_table;
use bdsde::prelude::*;

fn main() -> bdsde::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "field.csv".into());
    let params = LinearParams::default();
    let problem = linear_problem(params)?;
    let seeds = SeedPlan::new(3);
    let config = SolverConfig::new(20, 5000, 2.0, Domain::fixed_1d(60.0, 200.0));
    let grid = make_grid(params.horizon, config.steps)?;
    let b_path = sample_b_path(seeds.b_seed(0), &grid, 1);
    let w = sample_w_batch(seeds.w_seed(0, 0), &grid, 1, config.samples);
    let solution = backward_solve(&problem, &config, &b_path, w)?;

    let digest = field_table(&solution, &[0, 10, 19]).write(out.as_ref())?;
    println!("wrote {out} (body sha256 {digest})");

    let n = 10;
    println!(
        "n = {n}: {:>6} {:>10} {:>10} {:>10} {:>10}",
        "x", "y_n", "Y", "z_n", "Z"
    );
    for x in [90.0, 100.0, 110.0, 120.0] {
        println!(
            "        {x:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            solution.y_at(n, &[x])[0],
            explicit_linear_y(n, x, &b_path, &params),
            solution.z_at(n, &[x])[0],
            explicit_linear_z(n, x, &b_path, &params),
        );
    }
    Ok(())
}
