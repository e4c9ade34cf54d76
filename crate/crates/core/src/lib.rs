//! Monte Carlo regression solver for decoupled forward–backward doubly
//! stochastic differential equations, and through them for semilinear
//! stochastic PDEs.
//!
//! For one fixed trajectory of the backward noise `B`, the solver simulates
//! `M` Euler paths of the forward diffusion and walks backward in time,
//! projecting the `Y` and `Z` updates onto indicator functions of a hypercube
//! partition. The fitted fields `y_n(·)`, `z_n(·)` approximate `u(t_n, ·)` and
//! `∇u σ (t_n, ·)` of the associated SPDE.
//!
//! ```no_run
//! use bdsde::prelude::*;
//!
//! let problem = linear_problem(LinearParams::default())?;
//! let grid = make_grid(problem.horizon(), 20)?;
//! let b_path = sample_b_path(SeedPlan::new(7).b_seed(0), &grid, 1);
//! let config = SolverConfig::new(20, 1000, 1.0, Domain::fixed_1d(60.0, 200.0));
//! let w = sample_w_batch(SeedPlan::new(7).w_seed(0, 0), &grid, 1, 1000);
//! let solution = backward_solve(&problem, &config, &b_path, w)?;
//! println!("y0 = {}", solution.y0[0]);
//! # Ok::<(), bdsde::Error>(())
//! ```

// `!(x > 0.0)` style checks are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiment;
pub mod export;
pub mod forward;
pub mod grid;
pub mod paths;
pub mod problems;
pub mod regression;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analytics::{
        default_schedule, empirical_stats, error_vs_oracle, explicit_linear_y, explicit_linear_z,
        linear_params, loglog_slope, schedule, ErrorReport, FieldApproximation, LinearOracle,
        RunStats, ScheduleEntry,
    };
    pub use crate::error::{Error, Result};
    pub use crate::forward::{simulate_forward, PathBatch};
    pub use crate::grid::{make_grid, TimeGrid};
    pub use crate::paths::{
        coarsen_b_path, sample_b_path, sample_w_batch, BPath, SeedPlan, WBatch,
    };
    pub use crate::problems::{
        custom_problem, finance_problem, linear_problem, CustomSpec, Dims, FinanceParams,
        LinearParams, NoiseVariant, Problem,
    };
    pub use crate::regression::{build_basis, project, HypercubeBasis, PiecewiseField};
    pub use crate::solver::{
        backward_solve, run_repetitions, solve_on_paths, BackwardSolution, Domain, SolverConfig,
    };
}
