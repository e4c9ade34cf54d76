//! Command-line front end. Configuration precedence: defaults < `--config` file < flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bdsde::experiment::{
    compare_bsde, replay, run_experiment, ExperimentConfig, ModeConfig, Overrides, ProblemConfig,
    RunSummary, Verb,
};

#[derive(Parser)]
#[command(name = "bdsde", version, about = "Regression Monte Carlo for BDSDEs")]
struct Cli {
    /// Master seed for the B and W streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Problem name, overriding the file: linear, finance-g1, finance-g2, finance-g3.
    #[arg(long, global = true)]
    problem: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured setting(s) and write stats, fields and a manifest.
    Run,
    /// Run the refinement schedule j = 1..=j_max.
    Schedule {
        #[arg(long)]
        j_max: Option<usize>,
    },
    /// Compare the BDSDE with its g = 0 counterpart on the same seeds.
    CompareBsde,
    /// Re-run a manifest and verify the CSV outputs byte for byte.
    Replay { manifest: PathBuf },
}

fn base_config(cli: &Cli, default_problem: &str) -> bdsde::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let mut c = ExperimentConfig::linear_default();
            c.problem = ProblemConfig::named(default_problem);
            c
        }
    };
    if let Some(name) = &cli.problem {
        config.problem.name = name.clone();
    }
    Ok(config.apply(&Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
    }))
}

fn execute(cli: &Cli) -> bdsde::Result<RunSummary> {
    match &cli.command {
        Command::Run => run_experiment(&base_config(cli, "linear")?, Verb::Run),
        Command::Schedule { j_max } => {
            let mut config = base_config(cli, "linear")?;
            match (&mut config.mode, j_max) {
                (ModeConfig::Schedule { j_max: j, .. }, Some(v)) => *j = *v,
                (ModeConfig::Schedule { .. }, None) => {}
                (_, j) => {
                    config.mode = ModeConfig::Schedule {
                        j_max: j.unwrap_or(6),
                        alpha_m: 3.0,
                        beta: 1.0,
                        delta_base: 50.0,
                    }
                }
            }
            run_experiment(&config, Verb::Schedule)
        }
        Command::CompareBsde => compare_bsde(&base_config(cli, "finance-g1")?),
        Command::Replay { manifest } => replay(manifest, cli.out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli) {
        Ok(summary) => {
            for s in &summary.settings {
                let solver = &s.setting.solver;
                let y0 = s.stats.as_ref().map(|st| st.mean[0]);
                print!(
                    "j={} N={} M={} delta={} y0_mean={}",
                    s.setting.j,
                    solver.steps,
                    solver.samples,
                    solver.delta,
                    y0.map_or("-".into(), |v| format!("{v:.6}"))
                );
                if let Some(o) = s.oracle_y0 {
                    print!(" oracle={o:.6}");
                }
                if let Some(b) = &s.bsde_stats {
                    print!(" bsde_y0_mean={:.6}", b.mean[0]);
                }
                println!();
            }
            if let Some(slope) = summary.loglog_slope {
                println!("log-log slope: {slope:.4}");
            }
            println!("wrote {}", summary.out.display());
            if summary.is_complete() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "{} repetition(s) failed, see errors.log",
                    summary.failures.len()
                );
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
