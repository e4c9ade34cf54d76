//! Backward induction over a fixed trajectory of `B`.
//!
//! At each step `n = N-1, ..., 0` the `Z` field is regressed explicitly from
//! the step `n+1` quantities, then the implicit `Y` update is resolved with a
//! fixed number of Picard iterations holding `z_n` frozen. At `n = N` the
//! terminal values `Φ(X_N^m)` are used pointwise and `z_N ≡ 0`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{simulate_forward, PathBatch};
use crate::paths::{coarsen_b_path, sample_w_batch, BPath, SeedPlan, WBatch};
use crate::problems::Problem;
use crate::regression::{build_basis, HypercubeBasis, PiecewiseField};

/// Regression domain of the hypercube basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Domain {
    /// Fixed bounds `[d1, d2)`.
    Fixed { lower: Vec<f64>, upper: Vec<f64> },
    /// Componentwise min/max of all simulated states of the run.
    DataDriven,
}

impl Domain {
    pub fn fixed_1d(lower: f64, upper: f64) -> Self {
        Domain::Fixed {
            lower: vec![lower],
            upper: vec![upper],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub steps: usize,
    pub samples: usize,
    pub delta: f64,
    #[serde(default = "default_picard")]
    pub picard_iterations: usize,
    pub domain: Domain,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

fn default_picard() -> usize {
    3
}

fn default_repetitions() -> usize {
    50
}

impl SolverConfig {
    pub fn new(steps: usize, samples: usize, delta: f64, domain: Domain) -> Self {
        Self {
            steps,
            samples,
            delta,
            picard_iterations: default_picard(),
            domain,
            repetitions: default_repetitions(),
        }
    }

    pub fn with_picard(mut self, iterations: usize) -> Self {
        self.picard_iterations = iterations;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.steps == 0 {
            return bad("steps N must be >= 1".into());
        }
        if self.samples == 0 {
            return bad("samples M must be >= 1".into());
        }
        if self.picard_iterations == 0 {
            return bad("Picard iterations I must be >= 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be >= 1".into());
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad(format!("edge delta must be > 0, got {}", self.delta));
        }
        if let Domain::Fixed { lower, upper } = &self.domain {
            if lower.len() != upper.len() {
                return bad("domain bounds differ in length".into());
            }
        }
        Ok(())
    }

    /// Builds the basis for a simulated batch.
    pub fn basis_for(&self, batch: &PathBatch) -> Result<HypercubeBasis> {
        match &self.domain {
            Domain::Fixed { lower, upper } => {
                if lower.len() != batch.dim() {
                    return Err(Error::dims("domain bounds", batch.dim(), lower.len()));
                }
                build_basis(lower, upper, self.delta)
            }
            Domain::DataDriven => {
                let (lo, hi) = batch.bounds();
                let hi: Vec<f64> = lo
                    .iter()
                    .zip(&hi)
                    .map(|(&l, &h)| if h > l { h.next_up() } else { l + self.delta })
                    .collect();
                build_basis(&lo, &hi, self.delta)
            }
        }
    }
}

/// Fitted fields at every time node, conditional on one `B` path.
#[derive(Debug, Clone)]
pub struct BackwardSolution {
    basis: Arc<HypercubeBasis>,
    steps: usize,
    step: f64,
    k: usize,
    d: usize,
    /// `y_n`, `n = 0..=N`. The entry at `N` is the projection of `Φ(X_N^m)`,
    /// materialized for export only.
    pub y_fields: Vec<PiecewiseField>,
    /// `z_n`, `n = 0..=N`, with `z_N ≡ 0`.
    pub z_fields: Vec<PiecewiseField>,
    /// `y_0(x0)`.
    pub y0: Vec<f64>,
    /// `picard_residuals[n][i-1] = sup |y^(i) - y^(i-1)|` over cell values.
    pub picard_residuals: Vec<Vec<f64>>,
    pub conforming: bool,
}

impl BackwardSolution {
    pub fn basis(&self) -> &Arc<HypercubeBasis> {
        &self.basis
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `(k, d)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.k, self.d)
    }

    /// `y_n` evaluated at `x`.
    pub fn y_at(&self, n: usize, x: &[f64]) -> &[f64] {
        self.y_fields[n].eval(x)
    }

    /// `z_n` evaluated at `x`, `k × d` row-major.
    pub fn z_at(&self, n: usize, x: &[f64]) -> &[f64] {
        self.z_fields[n].eval(x)
    }
}

/// What the step `n` regressions read at time `t_{n+1}`.
#[derive(Debug, Clone, Copy)]
pub enum NextState<'a> {
    /// `n + 1 = N`: `y = Φ(X_N^m)` pointwise and `z = 0`.
    Terminal,
    /// Fitted fields at step `n + 1`.
    Fitted {
        y: &'a PiecewiseField,
        z: &'a PiecewiseField,
    },
}

/// One backward step: the quantities at `t_{n+1}` that both regressions of step `n` share.
pub struct BackwardStep<'a> {
    problem: &'a Problem,
    batch: &'a PathBatch,
    basis: &'a Arc<HypercubeBasis>,
    n: usize,
    cells: Vec<usize>,
    /// `y_{n+1}(X_{n+1}^m)`, `M × k`.
    next_y: Vec<f64>,
    /// `Σ_j g_{·,j}(t_{n+1}, Θ_{n+1}^m) ΔB_{n,j}`, `M × k`.
    noise_term: Vec<f64>,
}

impl<'a> BackwardStep<'a> {
    pub fn new(
        problem: &'a Problem,
        batch: &'a PathBatch,
        b_path: &BPath,
        basis: &'a Arc<HypercubeBasis>,
        n: usize,
        next: NextState<'_>,
    ) -> Result<Self> {
        let grid = batch.grid();
        if n >= grid.steps() {
            return Err(Error::InvalidConfig(format!(
                "backward step n={n} must be below N={}",
                grid.steps()
            )));
        }
        if b_path.grid().steps() != grid.steps() {
            return Err(Error::IncompatibleGrid(format!(
                "B path has N={} but the run has N={}",
                b_path.grid().steps(),
                grid.steps()
            )));
        }
        let dims = problem.dims();
        let (k, l, d) = (dims.k, dims.l, dims.d);
        if b_path.dim() != l {
            return Err(Error::dims("B dimension", l, b_path.dim()));
        }
        let t_next = grid.node(n + 1);
        let db = b_path.increment(n);
        let samples = batch.samples();

        let per_sample: Vec<(Vec<f64>, Vec<f64>)> = (0..samples)
            .into_par_iter()
            .map(|m| -> Result<(Vec<f64>, Vec<f64>)> {
                let x_next = batch.state(m, n + 1);
                let (y_next, z_next): (Vec<f64>, Vec<f64>) = match next {
                    NextState::Terminal => (problem.terminal(x_next), vec![0.0; k * d]),
                    NextState::Fitted { y, z } => {
                        let j = basis.locate(x_next);
                        (y.value_at_cell(j).to_vec(), z.value_at_cell(j).to_vec())
                    }
                };
                if y_next.len() != k {
                    return Err(Error::dims("terminal Φ", k, y_next.len()));
                }
                let g = problem.noise(t_next, x_next, &y_next, &z_next);
                if g.len() != k * l {
                    return Err(Error::dims("noise g", k * l, g.len()));
                }
                let noise: Vec<f64> = (0..k)
                    .map(|j1| (0..l).map(|j| g[j1 * l + j] * db[j]).sum())
                    .collect();
                if y_next.iter().chain(&noise).any(|v| !v.is_finite()) {
                    return Err(Error::non_finite("step n+1 values", n, m));
                }
                Ok((y_next, noise))
            })
            .collect::<Result<_>>()?;

        let mut next_y = Vec::with_capacity(samples * k);
        let mut noise_term = Vec::with_capacity(samples * k);
        for (y, g) in per_sample {
            next_y.extend(y);
            noise_term.extend(g);
        }
        let cells = basis.locate_all(&batch.slice(n));
        Ok(Self {
            problem,
            batch,
            basis,
            n,
            cells,
            next_y,
            noise_term,
        })
    }

    /// Cell of `X_n^m` for every sample.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Projects `(y_{n+1} + Σ g ΔB) ΔW_n / h` onto the basis at `X_n`.
    pub fn regress_z(&self) -> Result<PiecewiseField> {
        let dims = self.problem.dims();
        let (k, d) = (dims.k, dims.d);
        let h = self.batch.grid().step();
        let noise = self.batch.noise();
        let mut responses = Vec::with_capacity(self.cells.len() * k * d);
        for m in 0..self.cells.len() {
            let dw = noise.increment(m, self.n);
            for j1 in 0..k {
                let lead = self.next_y[m * k + j1] + self.noise_term[m * k + j1];
                for &w in dw {
                    let r = lead * w / h;
                    if !r.is_finite() {
                        return Err(Error::non_finite("Z response", self.n, m));
                    }
                    responses.push(r);
                }
            }
        }
        PiecewiseField::from_cells(Arc::clone(self.basis), &self.cells, &responses, k * d)
    }

    /// Runs `iterations` Picard steps for `y_n` starting from zero, with `z_n` frozen.
    ///
    /// Returns the last iterate and the sup-norm gap between successive iterates.
    pub fn picard_y(
        &self,
        z_n: &PiecewiseField,
        iterations: usize,
    ) -> Result<(PiecewiseField, Vec<f64>)> {
        let k = self.problem.dims().k;
        let grid = self.batch.grid();
        let (h, t) = (grid.step(), grid.node(self.n));
        let base: Vec<f64> = self
            .next_y
            .iter()
            .zip(&self.noise_term)
            .map(|(y, g)| y + g)
            .collect();

        let mut current = PiecewiseField::zeros(Arc::clone(self.basis), k);
        let mut residuals = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            let responses: Vec<Vec<f64>> = self
                .cells
                .par_iter()
                .enumerate()
                .map(|(m, &j)| -> Result<Vec<f64>> {
                    let x = self.batch.state(m, self.n);
                    let f =
                        self.problem
                            .driver(t, x, current.value_at_cell(j), z_n.value_at_cell(j));
                    if f.len() != k {
                        return Err(Error::dims("driver f", k, f.len()));
                    }
                    let r: Vec<f64> = (0..k).map(|c| base[m * k + c] + h * f[c]).collect();
                    if r.iter().any(|v| !v.is_finite()) {
                        return Err(Error::non_finite("Picard iterate", self.n, m));
                    }
                    Ok(r)
                })
                .collect::<Result<_>>()?;
            let flat: Vec<f64> = responses.into_iter().flatten().collect();
            let next = PiecewiseField::from_cells(Arc::clone(self.basis), &self.cells, &flat, k)?;
            residuals.push(next.sup_distance(&current));
            current = next;
        }
        Ok((current, residuals))
    }
}

fn run_grid_b_path(b_path: &BPath, batch: &PathBatch) -> Result<BPath> {
    let grid = batch.grid();
    if b_path.grid() == grid {
        Ok(b_path.clone())
    } else {
        coarsen_b_path(b_path, grid)
    }
}

/// Full backward induction on an already simulated batch.
pub fn solve_on_paths(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    batch: &PathBatch,
) -> Result<BackwardSolution> {
    config.validate()?;
    let grid = *batch.grid();
    if grid.steps() != config.steps {
        return Err(Error::IncompatibleGrid(format!(
            "batch has N={} but config asks for N={}",
            grid.steps(),
            config.steps
        )));
    }
    if (grid.horizon() - problem.horizon()).abs() > 1e-12 * problem.horizon() {
        return Err(Error::IncompatibleGrid(format!(
            "batch horizon {} differs from problem horizon {}",
            grid.horizon(),
            problem.horizon()
        )));
    }
    let b_path = run_grid_b_path(b_path, batch)?;
    let dims = problem.dims();
    let (k, d) = (dims.k, dims.d);
    let steps = grid.steps();
    let basis = Arc::new(config.basis_for(batch)?);

    let terminal_cells = basis.locate_all(&batch.slice(steps));
    let terminal: Vec<f64> = (0..batch.samples())
        .flat_map(|m| problem.terminal(batch.state(m, steps)))
        .collect();
    let y_terminal = PiecewiseField::from_cells(Arc::clone(&basis), &terminal_cells, &terminal, k)?;
    let z_terminal = PiecewiseField::zeros(Arc::clone(&basis), k * d);

    let mut y_fields = vec![y_terminal];
    let mut z_fields = vec![z_terminal];
    let mut picard_residuals = vec![Vec::new()];
    for n in (0..steps).rev() {
        let next = if n + 1 == steps {
            NextState::Terminal
        } else {
            let last = y_fields.len() - 1;
            NextState::Fitted {
                y: &y_fields[last],
                z: &z_fields[last],
            }
        };
        let step = BackwardStep::new(problem, batch, &b_path, &basis, n, next)?;
        let z_n = step.regress_z()?;
        let (y_n, residuals) = step.picard_y(&z_n, config.picard_iterations)?;
        y_fields.push(y_n);
        z_fields.push(z_n);
        picard_residuals.push(residuals);
    }
    y_fields.reverse();
    z_fields.reverse();
    picard_residuals.reverse();

    let y0 = y_fields[0].eval(problem.x0()).to_vec();
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("y0", 0, 0));
    }
    Ok(BackwardSolution {
        basis,
        steps,
        step: grid.step(),
        k,
        d,
        y_fields,
        z_fields,
        y0,
        picard_residuals,
        conforming: problem.is_conforming(),
    })
}

/// Simulates the forward paths driven by `w` and solves backward.
pub fn backward_solve(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    w: impl Into<Arc<WBatch>>,
) -> Result<BackwardSolution> {
    let w = w.into();
    if w.samples() != config.samples {
        return Err(Error::InvalidConfig(format!(
            "W batch has M={} but config asks for M={}",
            w.samples(),
            config.samples
        )));
    }
    let batch = simulate_forward(problem, w, problem.x0())?;
    solve_on_paths(problem, config, b_path, &batch)
}

/// Draws the `W` batch of repetition `rep` in `setting` and solves.
pub fn solve_repetition(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    seeds: &SeedPlan,
    setting: u64,
    rep: usize,
) -> Result<(PathBatch, BackwardSolution)> {
    let grid = crate::grid::make_grid(problem.horizon(), config.steps)?;
    let w = sample_w_batch(
        seeds.w_seed(setting, rep as u64),
        &grid,
        problem.dims().d,
        config.samples,
    );
    let batch = simulate_forward(problem, w, problem.x0())?;
    let solution = solve_on_paths(problem, config, b_path, &batch)?;
    Ok((batch, solution))
}

/// `config.repetitions` independent `W` batches against one fixed `B` path.
///
/// Element `r` holds repetition `r`; a failure does not stop the others.
pub fn run_repetitions_in(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    seeds: &SeedPlan,
    setting: u64,
) -> Result<Vec<Result<BackwardSolution>>> {
    config.validate()?;
    Ok((0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            solve_repetition(problem, config, b_path, seeds, setting, rep)
                .map(|(_, s)| s)
                .map_err(|e| Error::Repetition {
                    rep,
                    source: Box::new(e),
                })
        })
        .collect())
}

/// [`run_repetitions_in`] for setting `0` of `master_seed`.
pub fn run_repetitions(
    problem: &Problem,
    config: &SolverConfig,
    b_path: &BPath,
    master_seed: u64,
) -> Result<Vec<Result<BackwardSolution>>> {
    run_repetitions_in(problem, config, b_path, &SeedPlan::new(master_seed), 0)
}
