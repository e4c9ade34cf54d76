//! Experiment runner: settings, seeds, repetitions, CSV tables and manifests.
//!
//! Output directory layout:
//!
//! ```text
//! <out>/
//!   manifest.json      seeds, resolved config, diagnostics, CSV body digests
//!   settings.csv       j, path, N, M, delta, b_seed
//!   stats.csv          j, N, M, delta, I, reps, y0_mean, y0_std, oracle_y0, rel_err
//!   repetitions.csv    j, rep, w_seed, y0
//!   slices.csv         j, n, t, N, M, y_mean, y_std   (y_n(x0) at exported slices)
//!   errors.csv         j, N, M, delta, rep, seed, y_error, z_error, total   (oracle only)
//!   convergence.csv    j, N, M, delta, h, error_mean, y_error_mean, z_error_mean
//!   compare.csv        compare-bsde only: BSDE vs BDSDE stats per slice
//!   stats_bsde.csv     compare-bsde only: stats of the g ≡ 0 run
//!   fields/field_j<j>.csv   per-cell y/z fields of repetition 0
//!   errors.log         failed repetitions, if any
//! ```

pub mod config;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, ExportConfig, ModeConfig, Overrides, ProblemConfig};
pub use manifest::{Manifest, OutputRecord, SettingRecord, MANIFEST_FILE, MANIFEST_SCHEMA};

use crate::analytics::{
    common_refinement, empirical_stats, error_vs_oracle, explicit_linear_y, linear_params,
    loglog_slope, schedule, ErrorReport, RunStats,
};
use crate::error::{Error, Result};
use crate::export::{field_table, fmt_f64, git_revision, Table};
use crate::grid::make_grid;
use crate::paths::{coarsen_b_path, sample_b_path, BPath, SeedPlan};
use crate::problems::{LinearParams, Problem};
use crate::regression::OccupancyStats;
use crate::solver::{solve_repetition, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Run,
    Schedule,
    CompareBsde,
}

/// One `(N, M, δ)` setting against one `B` path.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub j: usize,
    pub path: usize,
    pub solver: SolverConfig,
}

impl Setting {
    /// Seed-derivation index of this setting.
    fn seed_index(&self) -> u64 {
        ((self.path as u64) << 16) | self.j as u64
    }
}

/// Expands the configured mode into settings and the number of `B` paths.
pub fn plan_settings(config: &ExperimentConfig, verb: Verb) -> Result<(Vec<Setting>, usize)> {
    let base = &config.solver;
    let with = |j: usize, path: usize, steps: usize, samples: usize, delta: f64| Setting {
        j,
        path,
        solver: SolverConfig {
            steps,
            samples,
            delta,
            ..base.clone()
        },
    };
    if verb == Verb::Schedule && !matches!(config.mode, ModeConfig::Schedule { .. }) {
        return Err(Error::ConfigField {
            field: "mode".into(),
            message: "`schedule` needs mode.kind = \"schedule\" (or --j-max)".into(),
        });
    }
    match &config.mode {
        ModeConfig::Single if config.sweep_samples.is_empty() => {
            Ok((vec![with(1, 0, base.steps, base.samples, base.delta)], 1))
        }
        ModeConfig::Single => Ok((
            config
                .sweep_samples
                .iter()
                .enumerate()
                .map(|(i, &m)| with(i + 1, 0, base.steps, m, base.delta))
                .collect(),
            1,
        )),
        ModeConfig::Schedule {
            j_max,
            alpha_m,
            beta,
            delta_base,
        } => Ok((
            schedule(*j_max, *alpha_m, *beta, *delta_base)
                .into_iter()
                .map(|e| with(e.j, 0, e.steps, e.samples, e.delta))
                .collect(),
            1,
        )),
        ModeConfig::Ensemble { paths, steps } => {
            let mut out = Vec::new();
            for p in 0..*paths {
                for (i, &n) in steps.iter().enumerate() {
                    out.push(with(
                        p * steps.len() + i + 1,
                        p,
                        n,
                        base.samples,
                        base.delta,
                    ));
                }
            }
            Ok((out, *paths))
        }
    }
}

/// Per-setting results returned to library callers.
#[derive(Debug, Clone)]
pub struct SettingSummary {
    pub setting: Setting,
    pub stats: Option<RunStats>,
    pub oracle_y0: Option<f64>,
    pub mean_error: Option<ErrorReport>,
    /// `(n, stats of y_n(x0))` at the exported slices.
    pub slices: Vec<(usize, RunStats)>,
    /// Stats of the `g ≡ 0` run, `compare-bsde` only.
    pub bsde_stats: Option<RunStats>,
    pub bsde_slices: Vec<(usize, RunStats)>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub settings: Vec<SettingSummary>,
    pub failures: Vec<String>,
    pub loglog_slope: Option<f64>,
    pub manifest: Manifest,
}

impl RunSummary {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

struct RepOutput {
    rep: usize,
    w_seed: u64,
    y0: f64,
    slices: Vec<f64>,
    error: Option<ErrorReport>,
    detail: Option<RepDetail>,
}

struct RepDetail {
    fields: Table,
    occupancy: Vec<OccupancyStats>,
    picard: Vec<Vec<f64>>,
    basis_clamps: u64,
}

struct SettingRun {
    reps: Vec<RepOutput>,
    failures: Vec<(usize, Error)>,
}

fn run_setting(
    problem: &Problem,
    setting: &Setting,
    b_fine: &BPath,
    seeds: &SeedPlan,
    oracle: Option<&LinearParams>,
    slices: &[usize],
    export_fields: bool,
) -> SettingRun {
    let outcomes: Vec<Result<RepOutput>> = (0..setting.solver.repetitions)
        .into_par_iter()
        .map(|rep| {
            let (batch, solution) = solve_repetition(
                problem,
                &setting.solver,
                b_fine,
                seeds,
                setting.seed_index(),
                rep,
            )?;
            let x0 = problem.x0();
            let error = oracle
                .map(|p| error_vs_oracle(&solution, &batch, b_fine, p))
                .transpose()?;
            let detail = (rep == 0).then(|| RepDetail {
                fields: if export_fields {
                    field_table(&solution, slices)
                } else {
                    Table::new("field", &[])
                },
                occupancy: solution
                    .y_fields
                    .iter()
                    .map(|f| f.occupancy_stats())
                    .collect(),
                picard: solution.picard_residuals.clone(),
                basis_clamps: solution.basis().clamp_count(),
            });
            Ok(RepOutput {
                rep,
                w_seed: seeds.w_seed(setting.seed_index(), rep as u64),
                y0: solution.y0[0],
                slices: slices.iter().map(|&n| solution.y_at(n, x0)[0]).collect(),
                error,
                detail,
            })
        })
        .collect();
    let mut reps = Vec::new();
    let mut failures = Vec::new();
    for (rep, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => reps.push(r),
            Err(e) => failures.push((rep, e)),
        }
    }
    SettingRun { reps, failures }
}

fn scalar_stats(values: impl IntoIterator<Item = f64>) -> Option<RunStats> {
    let v: Vec<Vec<f64>> = values.into_iter().map(|x| vec![x]).collect();
    empirical_stats(&v).ok()
}

fn mean_error(reps: &[RepOutput]) -> Option<ErrorReport> {
    let errors: Vec<ErrorReport> = reps.iter().filter_map(|r| r.error).collect();
    if errors.is_empty() {
        return None;
    }
    let n = errors.len() as f64;
    let y = errors.iter().map(|e| e.y_error).sum::<f64>() / n;
    let z = errors.iter().map(|e| e.z_error).sum::<f64>() / n;
    Some(ErrorReport {
        y_error: y,
        z_error: z,
        total: errors.iter().map(|e| e.total).sum::<f64>() / n,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn std0(s: &RunStats) -> Option<f64> {
    s.std.as_ref().map(|v| v[0])
}

fn stats_row(setting: &Setting, stats: Option<&RunStats>, oracle: Option<f64>) -> Vec<String> {
    let s = &setting.solver;
    let mean = stats.map(|s| s.mean[0]);
    let rel = mean.zip(oracle).map(|(m, o)| (m - o).abs() / o.abs());
    vec![
        setting.j.to_string(),
        s.steps.to_string(),
        s.samples.to_string(),
        fmt_f64(s.delta),
        s.picard_iterations.to_string(),
        stats.map_or(0, |s| s.count).to_string(),
        opt(mean),
        opt(stats.and_then(std0)),
        opt(oracle),
        opt(rel),
    ]
}

const STATS_HEADER: [&str; 10] = [
    "j",
    "N",
    "M",
    "delta",
    "I",
    "reps",
    "y0_mean",
    "y0_std",
    "oracle_y0",
    "rel_err",
];

struct Outputs {
    dir: PathBuf,
    records: Vec<OutputRecord>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir.join("fields")).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records: Vec::new(),
        })
    }

    fn write(&mut self, relative: &str, table: &Table) -> Result<()> {
        let digest = table.write(&self.dir.join(relative))?;
        self.records.push(OutputRecord {
            file: relative.to_string(),
            body_sha256: digest,
        });
        Ok(())
    }
}

/// Runs an experiment and writes its tables and manifest under `config.out`.
///
/// Repetition failures are collected rather than fatal: completed rows are
/// still written, failures go to `errors.log` and the manifest.
pub fn run_experiment(config: &ExperimentConfig, verb: Verb) -> Result<RunSummary> {
    config.validate()?;
    let problem = config.problem.build()?;
    if verb == Verb::CompareBsde && !config.problem.name.starts_with("finance") {
        return Err(Error::ConfigField {
            field: "problem.name".into(),
            message: "compare-bsde needs a finance problem".into(),
        });
    }
    let (settings, n_paths) = plan_settings(config, verb)?;
    let seeds = SeedPlan::new(config.seed);
    let fine_steps = common_refinement(settings.iter().map(|s| s.solver.steps));
    let fine = make_grid(problem.horizon(), fine_steps)?;
    let l = problem.dims().l;
    let b_paths: Vec<BPath> = (0..n_paths)
        .map(|p| sample_b_path(seeds.b_seed(p as u64), &fine, l))
        .collect();
    let oracle = linear_params(&problem).ok();
    let bsde = (verb == Verb::CompareBsde).then(|| problem.without_noise());

    let mut outputs = Outputs::new(&config.out)?;
    let mut settings_table = Table::new("settings", &["j", "path", "N", "M", "delta", "b_seed"]);
    let mut stats_table = Table::new("stats", &STATS_HEADER);
    let mut bsde_table = Table::new("stats_bsde", &STATS_HEADER);
    let mut reps_table = Table::new("repetitions", &["j", "rep", "w_seed", "y0"]);
    let mut slices_table = Table::new("slices", &["j", "n", "t", "N", "M", "y_mean", "y_std"]);
    let mut errors_table = Table::new(
        "errors",
        &[
            "j", "N", "M", "delta", "rep", "seed", "y_error", "z_error", "total",
        ],
    );
    let mut convergence_table = Table::new(
        "convergence",
        &[
            "j",
            "N",
            "M",
            "delta",
            "h",
            "error_mean",
            "y_error_mean",
            "z_error_mean",
        ],
    );
    let mut compare_table = Table::new(
        "compare",
        &[
            "j",
            "N",
            "M",
            "delta",
            "I",
            "reps",
            "n",
            "t",
            "bsde_mean",
            "bsde_std",
            "bdsde_mean",
            "bdsde_std",
        ],
    );

    let mut summaries = Vec::new();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut rate_points = Vec::new();

    for setting in &settings {
        let s = &setting.solver;
        let b_fine = &b_paths[setting.path];
        let b_run = coarsen_b_path(b_fine, &make_grid(problem.horizon(), s.steps)?)?;
        let slices = config.export.slices_for(s.steps);
        log::info!(
            "setting j={} path={} N={} M={} delta={} reps={}",
            setting.j,
            setting.path,
            s.steps,
            s.samples,
            s.delta,
            s.repetitions
        );
        let run = run_setting(
            &problem,
            setting,
            b_fine,
            &seeds,
            oracle.as_ref(),
            &slices,
            config.export.fields,
        );
        for (rep, e) in &run.failures {
            failures.push(format!("j={} rep={rep}: {e}", setting.j));
        }
        let t_at = |n: usize| s.steps.min(n) as f64 * problem.horizon() / s.steps as f64;

        let stats = scalar_stats(run.reps.iter().map(|r| r.y0));
        let oracle_y0 = oracle
            .as_ref()
            .map(|p| explicit_linear_y(0, problem.x0()[0], &b_run, p));
        settings_table.push(vec![
            setting.j.to_string(),
            setting.path.to_string(),
            s.steps.to_string(),
            s.samples.to_string(),
            fmt_f64(s.delta),
            seeds.b_seed(setting.path as u64).to_string(),
        ]);
        stats_table.push(stats_row(setting, stats.as_ref(), oracle_y0));
        for r in &run.reps {
            reps_table.push(vec![
                setting.j.to_string(),
                r.rep.to_string(),
                r.w_seed.to_string(),
                fmt_f64(r.y0),
            ]);
            if let Some(e) = r.error {
                errors_table.push(vec![
                    setting.j.to_string(),
                    s.steps.to_string(),
                    s.samples.to_string(),
                    fmt_f64(s.delta),
                    r.rep.to_string(),
                    r.w_seed.to_string(),
                    fmt_f64(e.y_error),
                    fmt_f64(e.z_error),
                    fmt_f64(e.total),
                ]);
            }
        }
        let slice_stats: Vec<(usize, RunStats)> = slices
            .iter()
            .enumerate()
            .filter_map(|(i, &n)| {
                scalar_stats(run.reps.iter().map(|r| r.slices[i])).map(|st| (n, st))
            })
            .collect();
        for (n, st) in &slice_stats {
            slices_table.push(vec![
                setting.j.to_string(),
                n.to_string(),
                fmt_f64(t_at(*n)),
                s.steps.to_string(),
                s.samples.to_string(),
                fmt_f64(st.mean[0]),
                opt(std0(st)),
            ]);
        }
        let err = mean_error(&run.reps);
        if let Some(e) = err {
            let h = problem.horizon() / s.steps as f64;
            rate_points.push((h, e.total));
            convergence_table.push(vec![
                setting.j.to_string(),
                s.steps.to_string(),
                s.samples.to_string(),
                fmt_f64(s.delta),
                fmt_f64(h),
                fmt_f64(e.total),
                fmt_f64(e.y_error),
                fmt_f64(e.z_error),
            ]);
        }

        let detail = run.reps.iter().find_map(|r| r.detail.as_ref());
        if let Some(d) = detail {
            if config.export.fields {
                outputs.write(&format!("fields/field_j{}.csv", setting.j), &d.fields)?;
            }
        }

        let (mut bsde_stats, mut bsde_slices) = (None, Vec::new());
        if let Some(bsde_problem) = &bsde {
            let brun = run_setting(bsde_problem, setting, b_fine, &seeds, None, &slices, false);
            for (rep, e) in &brun.failures {
                failures.push(format!("j={} rep={rep} (bsde): {e}", setting.j));
            }
            bsde_stats = scalar_stats(brun.reps.iter().map(|r| r.y0));
            bsde_table.push(stats_row(setting, bsde_stats.as_ref(), None));
            bsde_slices = slices
                .iter()
                .enumerate()
                .filter_map(|(i, &n)| {
                    scalar_stats(brun.reps.iter().map(|r| r.slices[i])).map(|st| (n, st))
                })
                .collect();
            for &n in slices.iter().rev() {
                let bd = slice_stats.iter().find(|(k, _)| *k == n).map(|(_, st)| st);
                let bs = bsde_slices.iter().find(|(k, _)| *k == n).map(|(_, st)| st);
                compare_table.push(vec![
                    setting.j.to_string(),
                    s.steps.to_string(),
                    s.samples.to_string(),
                    fmt_f64(s.delta),
                    s.picard_iterations.to_string(),
                    bd.map_or(0, |st| st.count).to_string(),
                    n.to_string(),
                    fmt_f64(t_at(n)),
                    opt(bs.map(|st| st.mean[0])),
                    opt(bs.and_then(std0)),
                    opt(bd.map(|st| st.mean[0])),
                    opt(bd.and_then(std0)),
                ]);
            }
        }

        records.push(SettingRecord {
            j: setting.j,
            path: setting.path,
            steps: s.steps,
            samples: s.samples,
            delta: s.delta,
            b_seed: seeds.b_seed(setting.path as u64),
            w_seeds: (0..s.repetitions)
                .map(|r| seeds.w_seed(setting.seed_index(), r as u64))
                .collect(),
            occupancy: detail.map(|d| d.occupancy.clone()).unwrap_or_default(),
            picard_residuals: detail.map(|d| d.picard.clone()).unwrap_or_default(),
            basis_clamps: detail.map_or(0, |d| d.basis_clamps),
        });
        summaries.push(SettingSummary {
            setting: setting.clone(),
            stats,
            oracle_y0,
            mean_error: err,
            slices: slice_stats,
            bsde_stats,
            bsde_slices,
        });
    }

    outputs.write("settings.csv", &settings_table)?;
    outputs.write("stats.csv", &stats_table)?;
    outputs.write("repetitions.csv", &reps_table)?;
    outputs.write("slices.csv", &slices_table)?;
    if oracle.is_some() {
        outputs.write("errors.csv", &errors_table)?;
        outputs.write("convergence.csv", &convergence_table)?;
    }
    if bsde.is_some() {
        outputs.write("stats_bsde.csv", &bsde_table)?;
        outputs.write("compare.csv", &compare_table)?;
    }
    let log_path = config.out.join("errors.log");
    if failures.is_empty() {
        let _ = fs::remove_file(&log_path);
    } else {
        fs::write(&log_path, failures.join("\n") + "\n").map_err(|e| Error::io(&log_path, e))?;
    }

    let distinct_h = {
        let mut hs: Vec<u64> = rate_points.iter().map(|(h, _)| h.to_bits()).collect();
        hs.sort_unstable();
        hs.dedup();
        hs.len()
    };
    let slope = (distinct_h >= 2 && rate_points.iter().all(|(_, e)| *e > 0.0))
        .then(|| {
            let (hs, es): (Vec<f64>, Vec<f64>) = rate_points.iter().copied().unzip();
            loglog_slope(&hs, &es).ok()
        })
        .flatten();

    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        revision: git_revision().into(),
        verb,
        config: config.clone(),
        conforming: problem.is_conforming(),
        settings: records,
        outputs: outputs.records,
        failures: failures.clone(),
        loglog_slope: slope,
        log_clamps: problem.diagnostics().log_clamps(),
    };
    manifest.write(&config.out.join(MANIFEST_FILE))?;

    Ok(RunSummary {
        out: config.out.clone(),
        settings: summaries,
        failures,
        loglog_slope: slope,
        manifest,
    })
}

/// Same run as [`run_experiment`] with the `g ≡ 0` comparison enabled.
pub fn compare_bsde(config: &ExperimentConfig) -> Result<RunSummary> {
    run_experiment(config, Verb::CompareBsde)
}

/// Re-runs a manifest and checks every CSV body against its recorded digest.
///
/// Writes to `out` when given, else to `<manifest dir>/replay`.
pub fn replay(manifest_path: &Path, out: Option<&Path>) -> Result<RunSummary> {
    let recorded = Manifest::load(manifest_path)?;
    let mut config = recorded.config.clone();
    config.out = match out {
        Some(p) => p.to_path_buf(),
        None => manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("replay"),
    };
    let summary = run_experiment(&config, recorded.verb)?;
    for expected in &recorded.outputs {
        let actual = summary
            .manifest
            .outputs
            .iter()
            .find(|o| o.file == expected.file)
            .map(|o| o.body_sha256.clone())
            .unwrap_or_else(|| "<missing>".into());
        if actual != expected.body_sha256 {
            return Err(Error::ReplayMismatch {
                file: expected.file.clone(),
                expected: expected.body_sha256.clone(),
                actual,
            });
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Domain;

    fn small_linear(out: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::linear_default();
        c.out = out.to_path_buf();
        c.seed = 5;
        c.solver =
            SolverConfig::new(8, 200, 2.0, Domain::fixed_1d(60.0, 200.0)).with_repetitions(4);
        c
    }

    #[test]
    fn single_run_writes_tables() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_experiment(&small_linear(dir.path()), Verb::Run).unwrap();
        assert!(summary.is_complete());
        for f in [
            "stats.csv",
            "repetitions.csv",
            "errors.csv",
            "slices.csv",
            "manifest.json",
            "fields/field_j1.csv",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let s = &summary.settings[0];
        assert_eq!(s.stats.as_ref().unwrap().count, 4);
        assert!(s.oracle_y0.is_some());
        let stats = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
        assert_eq!(
            stats.lines().nth(1).unwrap(),
            "j,N,M,delta,I,reps,y0_mean,y0_std,oracle_y0,rel_err"
        );
        let field = fs::read_to_string(dir.path().join("fields/field_j1.csv")).unwrap();
        assert_eq!(
            field.lines().nth(1).unwrap(),
            "n,cell_lo,cell_hi,occupancy,y_0,z_0_0"
        );
        // 70 cells × slices {0, 6, 7}
        assert_eq!(field.lines().count(), 2 + 3 * 70);
    }

    #[test]
    fn schedule_verb_requires_schedule_mode() {
        let dir = tempfile::tempdir().unwrap();
        assert!(run_experiment(&small_linear(dir.path()), Verb::Schedule).is_err());
    }

    #[test]
    fn schedule_mode_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_linear(dir.path());
        c.solver.domain = Domain::fixed_1d(40.0, 180.0);
        c.mode = ModeConfig::Schedule {
            j_max: 5,
            alpha_m: 3.0,
            beta: 1.0,
            delta_base: 50.0,
        };
        let summary = run_experiment(&c, Verb::Schedule).unwrap();
        assert_eq!(summary.settings.len(), 5);
        let deltas: Vec<f64> = summary
            .settings
            .iter()
            .map(|s| s.setting.solver.delta)
            .collect();
        assert!((deltas[2] - 25.0).abs() < 1e-12 && (deltas[4] - 12.5).abs() < 1e-12);
        let stats = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
        assert_eq!(stats.lines().count(), 2 + 5);
        let errors = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
        assert_eq!(errors.lines().count(), 2 + 5);
        assert!(summary.loglog_slope.is_some());
    }

    #[test]
    fn compare_needs_finance() {
        let dir = tempfile::tempdir().unwrap();
        assert!(compare_bsde(&small_linear(dir.path())).is_err());
    }

    #[test]
    fn ensemble_settings() {
        let mut c = ExperimentConfig::linear_default();
        c.mode = ModeConfig::Ensemble {
            paths: 2,
            steps: vec![4, 6, 12],
        };
        let (settings, paths) = plan_settings(&c, Verb::Run).unwrap();
        assert_eq!(paths, 2);
        assert_eq!(settings.len(), 6);
        assert_eq!(settings[4].path, 1);
        assert_eq!(settings[4].solver.steps, 6);
        let ids: std::collections::HashSet<u64> = settings.iter().map(|s| s.seed_index()).collect();
        assert_eq!(ids.len(), 6);
    }
}
