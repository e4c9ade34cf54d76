//! Experiment configuration: a TOML file, then command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{
    finance_problem, linear_problem, FinanceParams, LinearParams, NoiseVariant, Problem,
};
use crate::solver::{Domain, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `linear`, `finance-g1`, `finance-g2` or `finance-g3`.
    pub name: String,
    #[serde(default)]
    pub linear: LinearParams,
    #[serde(default)]
    pub finance: FinanceParams,
    /// Domain on which `log x` is evaluated for `finance-g1` / `finance-g3`.
    #[serde(default = "default_log_domain")]
    pub log_domain: [f64; 2],
}

fn default_log_domain() -> [f64; 2] {
    [60.0, 200.0]
}

impl ProblemConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            linear: LinearParams::default(),
            finance: FinanceParams::default(),
            log_domain: default_log_domain(),
        }
    }

    pub fn build(&self) -> Result<Problem> {
        let variant = match self.name.as_str() {
            "linear" => return linear_problem(self.linear),
            "finance-g1" => NoiseVariant::G1,
            "finance-g2" => NoiseVariant::G2,
            "finance-g3" => NoiseVariant::G3,
            "custom" => {
                return Err(Error::ConfigField {
                    field: "problem.name".into(),
                    message: "custom problems are only available through the library".into(),
                })
            }
            other => {
                return Err(Error::ConfigField {
                    field: "problem.name".into(),
                    message: format!(
                        "unknown problem `{other}`; expected linear, finance-g1, finance-g2 or finance-g3"
                    ),
                })
            }
        };
        finance_problem(self.finance, variant, self.log_domain)
    }
}

/// How the settings of an experiment are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModeConfig {
    /// One setting from `[solver]`, or one per entry of `sweep_samples`.
    #[default]
    Single,
    /// The `j`-indexed refinement schedule `(N_j, M_j, δ_j)`.
    Schedule {
        j_max: usize,
        #[serde(default = "default_alpha_m")]
        alpha_m: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_delta_base")]
        delta_base: f64,
    },
    /// Several `B` paths, each solved for every step count in `steps`.
    Ensemble { paths: usize, steps: Vec<usize> },
}

fn default_alpha_m() -> f64 {
    3.0
}

fn default_beta() -> f64 {
    1.0
}

fn default_delta_base() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    /// Write per-cell field CSVs for repetition 0 of every setting.
    #[serde(default = "yes")]
    pub fields: bool,
    /// Time slices to export; defaults to `{0, ⌊3N/4⌋, N-1}`.
    #[serde(default)]
    pub slices: Option<Vec<usize>>,
}

fn yes() -> bool {
    true
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self {
            fields: true,
            slices: None,
        }
    }
}

impl ExportConfig {
    pub fn slices_for(&self, steps: usize) -> Vec<usize> {
        let mut s = match &self.slices {
            Some(s) => s.iter().copied().filter(|&n| n <= steps).collect(),
            None => vec![0, 3 * steps / 4, steps.saturating_sub(1)],
        };
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    /// Sample counts swept in single mode, one setting each.
    #[serde(default)]
    pub sweep_samples: Vec<usize>,
    #[serde(default)]
    pub export: ExportConfig,
}

fn default_out() -> PathBuf {
    PathBuf::from("bdsde-out")
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// The default linear-case setting: `N = 20`, `M = 1000`, `δ = 1` on `[60, 200]`, 50 repetitions.
    pub fn linear_default() -> Self {
        Self {
            seed: 0,
            out: default_out(),
            problem: ProblemConfig::named("linear"),
            solver: SolverConfig::new(20, 1000, 1.0, Domain::fixed_1d(60.0, 200.0)),
            mode: ModeConfig::Single,
            sweep_samples: Vec::new(),
            export: ExportConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn apply(mut self, overrides: &Overrides) -> Self {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(out) = &overrides.out {
            self.out = out.clone();
        }
        self
    }

    /// Checks every field against the problem before any run starts.
    pub fn validate(&self) -> Result<()> {
        let field = |field: &str, message: String| Error::ConfigField {
            field: field.to_string(),
            message,
        };
        let problem = self.problem.build()?;
        let d = problem.dims().d;
        if let Domain::Fixed { lower, upper } = &self.solver.domain {
            if lower.len() != d || upper.len() != d {
                return Err(field(
                    "solver.domain",
                    format!(
                        "bounds must have {d} components for `{}`",
                        self.problem.name
                    ),
                ));
            }
            if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                return Err(field("solver.domain", "need lower < upper".into()));
            }
        }
        self.solver
            .validate()
            .map_err(|e| field("solver", e.to_string()))?;
        if self.sweep_samples.contains(&0) {
            return Err(field("sweep_samples", "sample counts must be >= 1".into()));
        }
        match &self.mode {
            ModeConfig::Single => {}
            ModeConfig::Schedule {
                j_max,
                alpha_m,
                beta,
                delta_base,
            } => {
                if *j_max == 0 {
                    return Err(field("mode.j_max", "must be >= 1".into()));
                }
                if !(*delta_base > 0.0) {
                    return Err(field("mode.delta_base", "must be > 0".into()));
                }
                if !(alpha_m.is_finite() && beta.is_finite()) {
                    return Err(field("mode", "alpha_m and beta must be finite".into()));
                }
            }
            ModeConfig::Ensemble { paths, steps } => {
                if *paths == 0 {
                    return Err(field("mode.paths", "must be >= 1".into()));
                }
                if steps.is_empty() || steps.contains(&0) {
                    return Err(field(
                        "mode.steps",
                        "need at least one step count >= 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 11
out = "out/linear"

[problem]
name = "linear"
[problem.linear]
a0 = 0.5
b0 = 0.5

[solver]
steps = 20
samples = 1000
delta = 1.0
picard_iterations = 3
repetitions = 50
[solver.domain]
mode = "fixed"
lower = [60.0]
upper = [200.0]
"#;

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.seed, 11);
        assert_eq!(c.solver.steps, 20);
        assert_eq!(c.problem.linear.strike, 115.0);
        assert_eq!(c.mode, ModeConfig::Single);
        let round = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(round, c);
    }

    #[test]
    fn overrides_win() {
        let c = ExperimentConfig::from_toml_str(SAMPLE)
            .unwrap()
            .apply(&Overrides {
                seed: Some(3),
                out: Some("elsewhere".into()),
            });
        assert_eq!((c.seed, c.out.to_str().unwrap()), (3, "elsewhere"));
    }

    #[test]
    fn field_level_errors() {
        let bad = SAMPLE.replace("name = \"linear\"", "name = \"heston\"");
        match ExperimentConfig::from_toml_str(&bad) {
            Err(Error::ConfigField { field, .. }) => assert_eq!(field, "problem.name"),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("lower = [60.0]", "lower = [60.0, 1.0]");
        match ExperimentConfig::from_toml_str(&bad) {
            Err(Error::ConfigField { field, .. }) => assert_eq!(field, "solver.domain"),
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("steps = 20", "steps = 0");
        assert!(matches!(
            ExperimentConfig::from_toml_str(&bad),
            Err(Error::ConfigField { .. })
        ));
        assert!(ExperimentConfig::from_toml_str("seed = 1").is_err());
    }

    #[test]
    fn default_slices() {
        let e = ExportConfig::default();
        assert_eq!(e.slices_for(20), vec![0, 15, 19]);
        assert_eq!(e.slices_for(1), vec![0]);
    }
}
