//! Euler–Maruyama simulation of the forward diffusion `dX = b(X) dt + σ(X) dW`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::paths::WBatch;
use crate::problems::Problem;

/// `M` Euler trajectories `X_n^m`, `n = 0..=N`, with the increments that drove them.
#[derive(Debug, Clone)]
pub struct PathBatch {
    grid: TimeGrid,
    dim: usize,
    samples: usize,
    /// Sample-major: `(m * (N + 1) + n) * d + c`.
    states: Vec<f64>,
    noise: Arc<WBatch>,
}

impl PathBatch {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn noise(&self) -> &WBatch {
        &self.noise
    }

    /// `X_n^m`.
    pub fn state(&self, m: usize, n: usize) -> &[f64] {
        let start = (m * (self.grid.steps() + 1) + n) * self.dim;
        &self.states[start..start + self.dim]
    }

    /// The time slice `X_n^m` for all `m`, flattened sample-major.
    pub fn slice(&self, n: usize) -> Vec<f64> {
        (0..self.samples)
            .flat_map(|m| self.state(m, n).iter().copied())
            .collect()
    }

    /// Componentwise min and max over every state in the batch.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for x in self.states.chunks_exact(self.dim) {
            for c in 0..self.dim {
                lo[c] = lo[c].min(x[c]);
                hi[c] = hi[c].max(x[c]);
            }
        }
        (lo, hi)
    }
}

/// Runs the Euler scheme for every sample of `w`, starting from `x0`.
///
/// Each trajectory depends only on its own increments, so the parallel
/// result equals the sequential one bit for bit.
pub fn simulate_forward(
    problem: &Problem,
    w: impl Into<Arc<WBatch>>,
    x0: &[f64],
) -> Result<PathBatch> {
    let w = w.into();
    let d = problem.dims().d;
    if w.dim() != d {
        return Err(Error::dims("W dimension", d, w.dim()));
    }
    if x0.len() != d {
        return Err(Error::dims("x0", d, x0.len()));
    }
    let grid = *w.grid();
    let steps = grid.steps();
    let h = grid.step();
    let per_sample = (steps + 1) * d;
    let mut states = vec![0.0; w.samples() * per_sample];

    states
        .par_chunks_mut(per_sample)
        .enumerate()
        .try_for_each(|(m, path)| -> Result<()> {
            path[..d].copy_from_slice(x0);
            for n in 1..=steps {
                let (done, rest) = path.split_at_mut(n * d);
                let prev = &done[(n - 1) * d..];
                let next = &mut rest[..d];
                let drift = problem.drift(prev);
                let diffusion = problem.diffusion(prev);
                if drift.len() != d {
                    return Err(Error::dims("drift b", d, drift.len()));
                }
                if diffusion.len() != d * d {
                    return Err(Error::dims("diffusion σ", d * d, diffusion.len()));
                }
                let dw = w.increment(m, n - 1);
                for i in 0..d {
                    let noise: f64 = (0..d).map(|j| diffusion[i * d + j] * dw[j]).sum();
                    next[i] = prev[i] + drift[i] * h + noise;
                }
                if next.iter().any(|v| !v.is_finite()) {
                    return Err(Error::non_finite("forward Euler state", n, m));
                }
            }
            Ok(())
        })?;

    Ok(PathBatch {
        grid,
        dim: d,
        samples: w.samples(),
        states,
        noise: w,
    })
}
