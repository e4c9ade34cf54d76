//! Seed derivation, `B` path sampling and dyadic coarsening.
//!
//! ```text
//! cargo run --example brownian_paths
//! ```

use bdsde::prelude::*;

fn main() -> bdsde::Result<()> {
    let seeds = SeedPlan::new(42);
    let fine = make_grid(0.25, 264)?;
    let b = sample_b_path(seeds.b_seed(0), &fine, 1);
    println!(
        "b_seed(0) = {}, B_T = {:.6}",
        seeds.b_seed(0),
        b.terminal()[0]
    );
    for steps in [2, 3, 4, 6, 8, 11] {
        let coarse = coarsen_b_path(&b, &make_grid(0.25, steps)?)?;
        // the endpoint is shared by every coarsening
        println!(
            "N = {steps:>3}: B_T = {:.6}, first increment {:+.6}",
            coarse.terminal()[0],
            coarse.increment(0)[0]
        );
    }
    let w = sample_w_batch(seeds.w_seed(0, 0), &make_grid(0.25, 20)?, 1, 1000);
    let var = (0..w.samples())
        .map(|m| w.increment(m, 0)[0].powi(2))
        .sum::<f64>()
        / w.samples() as f64;
    println!("empirical Var(ΔW) = {var:.5} (h = 0.0125)");
    Ok(())
}
