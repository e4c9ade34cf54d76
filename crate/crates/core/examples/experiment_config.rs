//! Runs an experiment from a TOML file, writes tables and a manifest, and
//! verifies the run by replaying the manifest.
//!
//! ```text
//! cargo run --release --example experiment_config -- [configs/linear.toml] [out_dir]
//! ```

use std::path::PathBuf;

use bdsde::experiment::{replay, run_experiment, ExperimentConfig, Overrides, Verb, MANIFEST_FILE};

fn main() -> bdsde::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(
        args.next()
            .unwrap_or_else(|| "crates/core/configs/linear.toml".into()),
    );
    let out = args.next().map(PathBuf::from);
    let config = ExperimentConfig::load(&path)?.apply(&Overrides { seed: None, out });

    let summary = run_experiment(&config, Verb::Run)?;
    for s in &summary.settings {
        if let (Some(stats), Some(oracle)) = (&s.stats, s.oracle_y0) {
            println!(
                "M = {:>5}: y0 mean {:.4}, closed form {oracle:.4}",
                s.setting.solver.samples, stats.mean[0]
            );
        }
    }
    let replayed = replay(&summary.out.join(MANIFEST_FILE), None)?;
    println!(
        "replay into {} matched {} files",
        replayed.out.display(),
        replayed.manifest.outputs.len()
    );
    Ok(())
}
