use std::fs;
use std::path::PathBuf;

use bdsde::experiment::{replay, run_experiment, ExperimentConfig, ModeConfig, Overrides, Verb};
use bdsde::export::body_digest;
use bdsde::Error;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

#[test]
fn shipped_configs_parse() {
    for name in ["linear.toml", "schedule.toml", "finance.toml"] {
        let c = ExperimentConfig::load(&shipped(name)).unwrap();
        c.problem.build().unwrap();
    }
    let s = ExperimentConfig::load(&shipped("schedule.toml")).unwrap();
    assert!(matches!(s.mode, ModeConfig::Schedule { j_max: 6, .. }));
}

#[test]
fn flags_override_file() {
    let c = ExperimentConfig::load(&shipped("linear.toml"))
        .unwrap()
        .apply(&Overrides {
            seed: Some(77),
            out: None,
        });
    assert_eq!(c.seed, 77);
    assert_eq!(c.out, PathBuf::from("out/linear"));
}

#[test]
fn same_seed_same_bodies_other_seed_differs() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::load(&shipped("finance.toml")).unwrap();
    c.solver.samples = 200;
    c.solver.repetitions = 3;
    c.out = dir.path().join("a");
    run_experiment(&c, Verb::Run).unwrap();
    c.out = dir.path().join("b");
    run_experiment(&c, Verb::Run).unwrap();
    c.seed += 1;
    c.out = dir.path().join("c");
    run_experiment(&c, Verb::Run).unwrap();
    let digest = |d: &str| body_digest(&dir.path().join(d).join("repetitions.csv")).unwrap();
    assert_eq!(digest("a"), digest("b"));
    assert_ne!(digest("a"), digest("c"));
}

#[test]
fn tampered_output_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::linear_default();
    c.solver.samples = 100;
    c.solver.repetitions = 2;
    c.out = dir.path().join("run");
    let summary = run_experiment(&c, Verb::Run).unwrap();
    let manifest_path = summary.out.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).unwrap();
    let digest = &summary.manifest.outputs[0].body_sha256;
    fs::write(
        &manifest_path,
        text.replace(digest.as_str(), &"0".repeat(64)),
    )
    .unwrap();
    match replay(&manifest_path, None) {
        Err(Error::ReplayMismatch { file, .. }) => {
            assert_eq!(file, summary.manifest.outputs[0].file)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn linear_y0_within_three_std_of_closed_form() {
    use bdsde::prelude::*;
    let params = LinearParams::default();
    let problem = linear_problem(params).unwrap();
    let grid = make_grid(params.horizon, 20).unwrap();
    let b_path = sample_b_path(SeedPlan::new(31).b_seed(0), &grid, 1);
    let config = SolverConfig::new(20, 5000, 1.0, Domain::fixed_1d(60.0, 200.0));
    let y0: Vec<Vec<f64>> = run_repetitions(&problem, &config, &b_path, 31)
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap().y0)
        .collect();
    let stats = empirical_stats(&y0).unwrap();
    let std = stats.std.unwrap()[0];
    let oracle = explicit_linear_y(0, params.x0, &b_path, &params);
    assert!((stats.mean[0] - oracle).abs() <= 3.0 * std, "{} vs {oracle} (std {std})", stats.mean[0]);
}
