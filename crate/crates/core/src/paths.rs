//! Seedable Brownian increments for the forward noise `W` and the backward noise `B`.
//!
//! Every sampler is a pure function of its seed and shape. Gaussian draws come
//! from a ChaCha8 stream; for a [`WBatch`] sample `m` owns stream `m` of the
//! batch seed and draws its increments step by step, component by component,
//! so the global order is sample-major, then time step, then component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

const B_DOMAIN: u64 = 0x42_5041_5448; // "BPATH"
const W_DOMAIN: u64 = 0x57_4241_5443; // "WBATC"

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based derivation of a sub-seed from `(master, domain, index)`.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ domain) ^ index)
}

/// Splits one master seed into independent `B` and `W` sub-seeds.
///
/// The `W` seed of repetition `rep` in setting `setting` depends only on
/// `(master, setting, rep)`, so repetitions can run in any order or in
/// parallel and still replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master: u64,
}

impl SeedPlan {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    /// Seed of the `index`-th backward noise path.
    pub fn b_seed(&self, index: u64) -> u64 {
        derive_seed(self.master, B_DOMAIN, index)
    }

    pub fn w_seed(&self, setting: u64, rep: u64) -> u64 {
        derive_seed(self.master, W_DOMAIN, (setting << 32) ^ rep)
    }
}

/// One trajectory of the `l`-dimensional backward noise `B` on a grid.
///
/// Node values `B_{t_n}` are stored alongside the increments so that coarsening
/// is a subsampling of nodes and therefore exact and associative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BPath {
    grid: TimeGrid,
    dim: usize,
    /// `B_{t_n}`, `(N + 1) * l` values, node-major.
    nodes: Vec<f64>,
    /// `ΔB_n = B_{t_{n+1}} - B_{t_n}`, `N * l` values, step-major.
    increments: Vec<f64>,
}

impl BPath {
    fn from_nodes(grid: TimeGrid, dim: usize, nodes: Vec<f64>) -> Self {
        let steps = grid.steps();
        debug_assert_eq!(nodes.len(), (steps + 1) * dim);
        let mut increments = Vec::with_capacity(steps * dim);
        for n in 0..steps {
            for c in 0..dim {
                increments.push(nodes[(n + 1) * dim + c] - nodes[n * dim + c]);
            }
        }
        Self {
            grid,
            dim,
            nodes,
            increments,
        }
    }

    /// A path with every increment zero.
    pub fn zero(grid: TimeGrid, dim: usize) -> Self {
        Self::from_nodes(grid, dim, vec![0.0; (grid.steps() + 1) * dim])
    }

    /// Builds a path from explicit increments, step-major.
    pub fn from_increments(grid: TimeGrid, dim: usize, increments: &[f64]) -> Result<Self> {
        if increments.len() != grid.steps() * dim {
            return Err(Error::dims(
                "B increments",
                grid.steps() * dim,
                increments.len(),
            ));
        }
        let mut nodes = vec![0.0; (grid.steps() + 1) * dim];
        for n in 0..grid.steps() {
            for c in 0..dim {
                nodes[(n + 1) * dim + c] = nodes[n * dim + c] + increments[n * dim + c];
            }
        }
        Ok(Self::from_nodes(grid, dim, nodes))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ΔB_n`, one value per component.
    pub fn increment(&self, n: usize) -> &[f64] {
        &self.increments[n * self.dim..(n + 1) * self.dim]
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `B_{t_n}`.
    pub fn value(&self, n: usize) -> &[f64] {
        &self.nodes[n * self.dim..(n + 1) * self.dim]
    }

    pub fn terminal(&self) -> &[f64] {
        self.value(self.grid.steps())
    }

    /// `B_T - B_{t_n}` for component `c`.
    pub fn tail(&self, n: usize, c: usize) -> f64 {
        self.terminal()[c] - self.value(n)[c]
    }
}

/// Draws a `B` path on `grid` (normally the finest grid of an experiment).
pub fn sample_b_path(seed: u64, grid: &TimeGrid, dim: usize) -> BPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = grid.step().sqrt();
    let mut nodes = vec![0.0; (grid.steps() + 1) * dim];
    for n in 0..grid.steps() {
        for c in 0..dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            nodes[(n + 1) * dim + c] = nodes[n * dim + c] + scale * z;
        }
    }
    BPath::from_nodes(*grid, dim, nodes)
}

/// Restricts `path` to a coarser grid whose step count divides the path's.
pub fn coarsen_b_path(path: &BPath, coarse: &TimeGrid) -> Result<BPath> {
    let ratio = path.grid.refinement_of(coarse).ok_or_else(|| {
        Error::IncompatibleGrid(format!(
            "cannot coarsen N={} (T={}) to N={} (T={})",
            path.grid.steps(),
            path.grid.horizon(),
            coarse.steps(),
            coarse.horizon()
        ))
    })?;
    let dim = path.dim;
    let nodes = (0..=coarse.steps())
        .flat_map(|n| path.value(n * ratio).iter().copied())
        .collect();
    Ok(BPath::from_nodes(*coarse, dim, nodes))
}

/// `M` independent `d`-dimensional forward noise increments on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WBatch {
    grid: TimeGrid,
    dim: usize,
    samples: usize,
    /// `samples * N * d` values, sample-major.
    increments: Vec<f64>,
}

impl WBatch {
    /// Builds a batch from explicit increments laid out sample-major.
    pub fn from_increments(
        grid: TimeGrid,
        dim: usize,
        samples: usize,
        increments: Vec<f64>,
    ) -> Result<Self> {
        let expected = samples * grid.steps() * dim;
        if increments.len() != expected {
            return Err(Error::dims("W increments", expected, increments.len()));
        }
        if samples == 0 {
            return Err(Error::EmptySample(
                "W batch needs at least one sample".into(),
            ));
        }
        Ok(Self {
            grid,
            dim,
            samples,
            increments,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `ΔW_n^m`.
    pub fn increment(&self, m: usize, n: usize) -> &[f64] {
        let start = (m * self.grid.steps() + n) * self.dim;
        &self.increments[start..start + self.dim]
    }

    /// All increments of sample `m`, step-major.
    pub fn sample(&self, m: usize) -> &[f64] {
        let len = self.grid.steps() * self.dim;
        &self.increments[m * len..(m + 1) * len]
    }
}

/// Draws `M` independent forward noise paths. Panics if `samples == 0`.
pub fn sample_w_batch(seed: u64, grid: &TimeGrid, dim: usize, samples: usize) -> WBatch {
    assert!(samples >= 1, "W batch needs at least one sample");
    let per_sample = grid.steps() * dim;
    let scale = grid.step().sqrt();
    let mut increments = vec![0.0; samples * per_sample];
    if per_sample > 0 {
        increments
            .par_chunks_mut(per_sample)
            .enumerate()
            .for_each(|(m, chunk)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(m as u64);
                for v in chunk.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v = scale * z;
                }
            });
    }
    WBatch {
        grid: *grid,
        dim,
        samples,
        increments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    /// Asymptotic Kolmogorov survival function `P(K > x)`.
    fn kolmogorov_sf(x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 1..200 {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (-2.0 * k * k * x * x).exp();
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }

    #[test]
    fn b_path_is_deterministic() {
        let g = make_grid(0.25, 20).unwrap();
        assert_eq!(sample_b_path(7, &g, 2), sample_b_path(7, &g, 2));
        assert_ne!(sample_b_path(7, &g, 2), sample_b_path(8, &g, 2));
    }

    #[test]
    fn b_terminal_is_sum_of_increments() {
        let g = make_grid(0.25, 264).unwrap();
        let p = sample_b_path(11, &g, 3);
        for c in 0..3 {
            let s: f64 = (0..g.steps()).map(|n| p.increment(n)[c]).sum();
            assert!((s - p.terminal()[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn b_increments_pass_ks_against_normal() {
        let g = make_grid(0.25, 20).unwrap();
        let mut draws: Vec<f64> = (0..500u64)
            .flat_map(|s| sample_b_path(1000 + s, &g, 1).increments().to_vec())
            .collect();
        assert_eq!(draws.len(), 10_000);
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let normal = Normal::new(0.0, 0.0125f64.sqrt()).unwrap();
        let n = draws.len() as f64;
        let d = draws
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = normal.cdf(x);
                (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
            })
            .fold(0.0, f64::max);
        let p = kolmogorov_sf(d * n.sqrt());
        assert!(p > 0.01, "KS p-value {p} (D = {d})");
    }

    #[test]
    fn coarsen_identity_and_pairs() {
        let fine = make_grid(1.0, 4).unwrap();
        let p = sample_b_path(3, &fine, 1);
        assert_eq!(coarsen_b_path(&p, &fine).unwrap(), p);

        let coarse = make_grid(1.0, 2).unwrap();
        let c = coarsen_b_path(&p, &coarse).unwrap();
        let i = p.increments();
        assert!((c.increment(0)[0] - (i[0] + i[1])).abs() < 1e-15);
        assert!((c.increment(1)[0] - (i[2] + i[3])).abs() < 1e-15);
        assert_eq!(c.terminal(), p.terminal());
    }

    #[test]
    fn coarsen_rejects_non_divisible() {
        let p = sample_b_path(3, &make_grid(1.0, 6).unwrap(), 1);
        assert!(coarsen_b_path(&p, &make_grid(1.0, 4).unwrap()).is_err());
    }

    #[test]
    fn w_batch_determinism_and_distinct_seeds() {
        let g = make_grid(0.25, 5).unwrap();
        let a = sample_w_batch(5, &g, 2, 100);
        assert_eq!(a, sample_w_batch(5, &g, 2, 100));
        assert_ne!(a, sample_w_batch(6, &g, 2, 100));
    }

    #[test]
    fn w_batch_prefix_is_stable_under_sample_count() {
        let g = make_grid(0.25, 5).unwrap();
        let small = sample_w_batch(5, &g, 1, 10);
        let large = sample_w_batch(5, &g, 1, 50);
        for m in 0..10 {
            assert_eq!(small.sample(m), large.sample(m));
        }
    }

    #[test]
    fn w_batch_variance_matches_step() {
        // Sample variance of 10^4 N(0, 0.25) draws has std 0.25 * sqrt(2 / 9999) ~ 0.0035.
        let g = make_grid(0.25, 1).unwrap();
        let w = sample_w_batch(2024, &g, 1, 10_000);
        let xs: Vec<f64> = (0..w.samples()).map(|m| w.increment(m, 0)[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((var - 0.25).abs() < 0.0125, "variance {var}");
        assert!(mean.abs() < 5.0 / (xs.len() as f64).sqrt());
    }

    #[test]
    fn w_seed_change_never_touches_b() {
        let a = SeedPlan::new(1);
        assert_ne!(a.w_seed(0, 0), a.w_seed(0, 1));
        assert_ne!(a.w_seed(0, 0), a.w_seed(1, 0));
        assert_eq!(a.b_seed(0), SeedPlan::new(1).b_seed(0));
        assert_ne!(a.b_seed(0), a.w_seed(0, 0));
    }

    proptest! {
        #[test]
        fn coarsening_is_associative(seed in any::<u64>(), coarse in 1usize..6, a in 1usize..4, b in 1usize..4, l in 1usize..3) {
            let mid_steps = coarse * a;
            let fine_steps = mid_steps * b;
            let fine = sample_b_path(seed, &make_grid(0.5, fine_steps).unwrap(), l);
            let mid_grid = make_grid(0.5, mid_steps).unwrap();
            let coarse_grid = make_grid(0.5, coarse).unwrap();
            let direct = coarsen_b_path(&fine, &coarse_grid).unwrap();
            let two_step = coarsen_b_path(&coarsen_b_path(&fine, &mid_grid).unwrap(), &coarse_grid).unwrap();
            prop_assert_eq!(&direct, &two_step);
            prop_assert_eq!(direct.terminal(), fine.terminal());
        }
    }
}
