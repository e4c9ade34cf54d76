//! Closed-form oracles, error metrics, repetition statistics and the
//! convergence-study schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::PathBatch;
use crate::paths::{coarsen_b_path, BPath};
use crate::problems::{LinearParams, Problem, ProblemKind};
use crate::solver::BackwardSolution;

/// Parameters of the closed-form solution of a built-in linear problem.
///
/// A linear problem whose noise coefficient was removed keeps its oracle with `b0 = 0`.
pub fn linear_params(problem: &Problem) -> Result<LinearParams> {
    match problem.kind() {
        ProblemKind::Linear(p) => {
            let mut p = *p;
            if problem.noise_vanishes() {
                p.b0 = 0.0;
            }
            Ok(p)
        }
        _ => Err(Error::NoOracle(format!(
            "`{}` is not the linear problem",
            problem.name()
        ))),
    }
}

/// `exp(a0 τ + b0 ΔB - b0² τ / 2)` with `τ = T - t`, `ΔB = B_T - B_t`.
fn noise_multiplier(p: &LinearParams, t: f64, b_tail: f64) -> f64 {
    let tau = p.horizon - t;
    (p.a0 * tau + p.b0 * b_tail - 0.5 * p.b0 * p.b0 * tau).exp()
}

/// Explicit `Y_t^{t,x} = exp(a0 τ + b0 (B_T - B_t) - b0² τ / 2) (K - x e^{μ τ})`.
pub fn explicit_linear_y_at(t: f64, x: f64, b_tail: f64, p: &LinearParams) -> f64 {
    noise_multiplier(p, t, b_tail) * (p.strike - x * (p.mu * (p.horizon - t)).exp())
}

/// Explicit `Z_t^{t,x} = ∂_x Y · σ x = -σ x e^{μ τ} exp(a0 τ + b0 (B_T - B_t) - b0² τ / 2)`.
pub fn explicit_linear_z_at(t: f64, x: f64, b_tail: f64, p: &LinearParams) -> f64 {
    -p.sigma * x * (p.mu * (p.horizon - t)).exp() * noise_multiplier(p, t, b_tail)
}

/// `Y` at node `t_n` of `b_path`'s grid, conditional on that path.
pub fn explicit_linear_y(n: usize, x: f64, b_path: &BPath, p: &LinearParams) -> f64 {
    explicit_linear_y_at(b_path.grid().node(n), x, b_path.tail(n, 0), p)
}

/// `Z` at node `t_n` of `b_path`'s grid, conditional on that path.
pub fn explicit_linear_z(n: usize, x: f64, b_path: &BPath, p: &LinearParams) -> f64 {
    explicit_linear_z_at(b_path.grid().node(n), x, b_path.tail(n, 0), p)
}

/// Anything that can be read as approximations `y_n(x)`, `z_n(x)` on a time grid.
pub trait FieldApproximation {
    fn y_value(&self, n: usize, x: &[f64]) -> Vec<f64>;
    fn z_value(&self, n: usize, x: &[f64]) -> Vec<f64>;
}

impl FieldApproximation for BackwardSolution {
    fn y_value(&self, n: usize, x: &[f64]) -> Vec<f64> {
        self.y_at(n, x).to_vec()
    }

    fn z_value(&self, n: usize, x: &[f64]) -> Vec<f64> {
        self.z_at(n, x).to_vec()
    }
}

/// The explicit linear solution along one `B` path, usable in place of fitted fields.
#[derive(Debug, Clone)]
pub struct LinearOracle {
    pub params: LinearParams,
    pub b_path: BPath,
}

impl FieldApproximation for LinearOracle {
    fn y_value(&self, n: usize, x: &[f64]) -> Vec<f64> {
        vec![explicit_linear_y(n, x[0], &self.b_path, &self.params)]
    }

    fn z_value(&self, n: usize, x: &[f64]) -> Vec<f64> {
        vec![explicit_linear_z(n, x[0], &self.b_path, &self.params)]
    }
}

/// Monte Carlo estimate of the mean-square error against the explicit solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `max_n mean_m |Y(t_n, X_n^m) - y_n(X_n^m)|²`.
    pub y_error: f64,
    /// `h Σ_n mean_m |Z(t_n, X_n^m) - z_n(X_n^m)|²`.
    pub z_error: f64,
    pub total: f64,
}

/// Error of `approx` against the linear oracle on the states of `batch`.
///
/// Both sums run over `n = 0..N-1`; at `t_N` the scheme uses `Φ` exactly and
/// `z_N = 0` by construction.
pub fn error_vs_oracle(
    approx: &impl FieldApproximation,
    batch: &PathBatch,
    b_path: &BPath,
    p: &LinearParams,
) -> Result<ErrorReport> {
    if batch.dim() != 1 {
        return Err(Error::NoOracle("linear oracle is one-dimensional".into()));
    }
    let grid = *batch.grid();
    let b_path = if b_path.grid() == &grid {
        b_path.clone()
    } else {
        coarsen_b_path(b_path, &grid)?
    };
    let oracle = LinearOracle { params: *p, b_path };
    let samples = batch.samples() as f64;
    let mut y_error: f64 = 0.0;
    let mut z_sum = 0.0;
    for n in 0..grid.steps() {
        let mut ys = 0.0;
        let mut zs = 0.0;
        for m in 0..batch.samples() {
            let x = batch.state(m, n);
            let y = approx.y_value(n, x);
            let z = approx.z_value(n, x);
            ys += (oracle.y_value(n, x)[0] - y[0]).powi(2);
            zs += (oracle.z_value(n, x)[0] - z[0]).powi(2);
        }
        y_error = y_error.max(ys / samples);
        z_sum += zs / samples;
    }
    let z_error = grid.step() * z_sum;
    Ok(ErrorReport {
        y_error,
        z_error,
        total: y_error + z_error,
    })
}

/// Empirical mean and `(count - 1)`-divisor standard deviation of repetition values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub mean: Vec<f64>,
    /// `None` for a single value.
    pub std: Option<Vec<f64>>,
    pub count: usize,
    pub values: Vec<Vec<f64>>,
}

pub fn empirical_stats(values: &[Vec<f64>]) -> Result<RunStats> {
    let first = values
        .first()
        .ok_or_else(|| Error::EmptySample("statistics need at least one value".into()))?;
    let width = first.len();
    if let Some(bad) = values.iter().find(|v| v.len() != width) {
        return Err(Error::dims("repetition value", width, bad.len()));
    }
    let count = values.len();
    let mut mean = vec![0.0; width];
    for v in values {
        for (acc, x) in mean.iter_mut().zip(v) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= count as f64);
    let std = (count >= 2).then(|| {
        (0..width)
            .map(|c| {
                let ss: f64 = values.iter().map(|v| (v[c] - mean[c]).powi(2)).sum();
                (ss / (count - 1) as f64).sqrt()
            })
            .collect()
    });
    Ok(RunStats {
        mean,
        std,
        count,
        values: values.to_vec(),
    })
}

/// One `(N, M, δ)` triple of the refinement schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub j: usize,
    pub steps: usize,
    pub samples: usize,
    pub delta: f64,
}

/// `N_j = 2 √2^{j-1}`, `M_j = 2 √2^{α_M (j-1)}`, `δ_j = δ_base / √2^{(j-1)(β+1)/2}`
/// for `j = 1..=j_max`, with `N` and `M` rounded to the nearest integer and `N >= 2`.
pub fn schedule(j_max: usize, alpha_m: f64, beta: f64, delta_base: f64) -> Vec<ScheduleEntry> {
    // √2^x as 2^(x/2), exact at even x
    let root2 = |x: f64| 2f64.powf(x / 2.0);
    (1..=j_max)
        .map(|j| {
            let e = (j - 1) as f64;
            ScheduleEntry {
                j,
                steps: ((2.0 * root2(e)).round() as usize).max(2),
                samples: ((2.0 * root2(alpha_m * e)).round() as usize).max(1),
                delta: delta_base / root2(e * (beta + 1.0) / 2.0),
            }
        })
        .collect()
}

/// The default schedule, `α_M = 3`, `β = 1`, `δ_base = 50`.
pub fn default_schedule(j_max: usize) -> Vec<ScheduleEntry> {
    schedule(j_max, 3.0, 1.0, 50.0)
}

/// Ordinary least-squares slope of `ln(err)` against `ln(h)`.
pub fn loglog_slope(steps: &[f64], errors: &[f64]) -> Result<f64> {
    if steps.len() != errors.len() || steps.len() < 2 {
        return Err(Error::EmptySample(
            "slope needs at least two (h, error) pairs".into(),
        ));
    }
    if steps.iter().chain(errors).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidConfig(
            "log-log slope needs positive values".into(),
        ));
    }
    let xs: Vec<f64> = steps.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Least common multiple of step counts: the finest grid every entry coarsens from.
pub fn common_refinement(steps: impl IntoIterator<Item = usize>) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    steps.into_iter().fold(1, |acc, n| acc / gcd(acc, n) * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::simulate_forward;
    use crate::grid::make_grid;
    use crate::paths::{sample_b_path, sample_w_batch, WBatch};
    use crate::problems::{finance_problem, linear_problem, FinanceParams, NoiseVariant};
    use crate::solver::{solve_on_paths, Domain, SolverConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn noiseless() -> LinearParams {
        LinearParams {
            a0: 0.0,
            b0: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_value_matches_gbm_monte_carlo() {
        // E[K - X_T] for exact GBM terminal values, 10^6 draws.
        let p = noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let g: f64 = rng.sample(StandardNormal);
            let xt = 100.0 * ((0.05 - 0.02) * 0.25 + 0.2 * 0.5 * g).exp();
            let v = 115.0 - xt;
            s += v;
            s2 += v * v;
        }
        let mean = s / draws as f64;
        let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        let closed = explicit_linear_y_at(0.0, 100.0, 0.0, &p);
        assert!((closed - (115.0 - 100.0 * 0.0125f64.exp())).abs() < 1e-12);
        assert!((closed - 13.7421).abs() < 1e-4);
        assert!((mean - closed).abs() < 4.0 * se, "mc {mean} vs {closed}");
    }

    #[test]
    fn multiplier_plug_in() {
        let p = LinearParams::default();
        let y = explicit_linear_y_at(0.0, 100.0, 0.0, &p);
        let expected = 0.09375f64.exp() * (115.0 - 100.0 * 0.0125f64.exp());
        assert!((y - expected).abs() < 1e-12);
    }

    #[test]
    fn z_special_cases() {
        let p = LinearParams {
            sigma: 0.0,
            ..Default::default()
        };
        assert_eq!(explicit_linear_z_at(0.1, 100.0, 0.3, &p), 0.0);
        let q = noiseless();
        let z = explicit_linear_z_at(0.0, 100.0, 0.0, &q);
        assert!((z - (-0.2 * 100.0 * 0.0125f64.exp())).abs() < 1e-12);
        for x in [1.0, 50.0, 100.0, 300.0] {
            assert!(explicit_linear_z_at(0.05, x, -0.2, &LinearParams::default()) < 0.0);
        }
    }

    #[test]
    fn z_is_sigma_x_times_gradient() {
        let p = LinearParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t: f64 = rng.random_range(0.0..0.25);
            let x: f64 = rng.random_range(60.0..200.0);
            let tail: f64 = rng.random_range(-0.5..0.5);
            let eps = 1e-5;
            let grad = (explicit_linear_y_at(t, x + eps, tail, &p)
                - explicit_linear_y_at(t, x - eps, tail, &p))
                / (2.0 * eps);
            let fd = grad * p.sigma * x;
            let z = explicit_linear_z_at(t, x, tail, &p);
            assert!(((fd - z) / z).abs() < 1e-6, "fd {fd} vs {z}");
        }
    }

    #[test]
    fn no_backward_noise_means_path_independent() {
        let p = LinearParams {
            b0: 0.0,
            ..Default::default()
        };
        let grid = make_grid(0.25, 20).unwrap();
        let b1 = sample_b_path(1, &grid, 1);
        let b2 = sample_b_path(2, &grid, 1);
        for n in 0..=20 {
            assert_eq!(
                explicit_linear_y(n, 97.0, &b1, &p),
                explicit_linear_y(n, 97.0, &b2, &p)
            );
            assert_eq!(
                explicit_linear_z(n, 97.0, &b1, &p),
                explicit_linear_z(n, 97.0, &b2, &p)
            );
        }
    }

    #[test]
    fn oracle_rejects_non_linear() {
        let prob =
            finance_problem(FinanceParams::default(), NoiseVariant::G2, [60.0, 200.0]).unwrap();
        assert!(matches!(linear_params(&prob), Err(Error::NoOracle(_))));
        let lin = linear_problem(LinearParams::default())
            .unwrap()
            .without_noise();
        assert_eq!(linear_params(&lin).unwrap().b0, 0.0);
    }

    #[test]
    fn stats_divisors() {
        let s = empirical_stats(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert_eq!((s.mean[0], s.std.as_ref().unwrap()[0]), (1.0, 0.0));
        let s = empirical_stats(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(s.mean[0], 1.0);
        assert!((s.std.unwrap()[0] - 2f64.sqrt()).abs() < 1e-15);
        let fifty: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let s = empirical_stats(&fifty).unwrap();
        let ss: f64 = (0..50).map(|i| (i as f64 - 24.5).powi(2)).sum();
        assert!((s.std.unwrap()[0] - (ss / 49.0).sqrt()).abs() < 1e-12);
        assert!(empirical_stats(&[]).is_err());
        assert!(empirical_stats(&[vec![1.0]]).unwrap().std.is_none());
    }

    #[test]
    fn schedule_entries() {
        let s = default_schedule(6);
        let triples: Vec<(usize, usize, f64)> =
            s.iter().map(|e| (e.steps, e.samples, e.delta)).collect();
        assert_eq!((triples[0].0, triples[0].1), (2, 2));
        assert!((triples[0].2 - 50.0).abs() < 1e-12);
        assert_eq!((triples[2].0, triples[2].1), (4, 16));
        assert!((triples[2].2 - 25.0).abs() < 1e-12);
        assert_eq!((triples[4].0, triples[4].1), (8, 128));
        assert!((triples[4].2 - 12.5).abs() < 1e-12);
        // 2√2 ≈ 2.83 → 3, 4√2 ≈ 5.66 → 6, 8√2 ≈ 11.3 → 11.
        assert_eq!(triples[1].0, 3);
        assert_eq!(triples[3].0, 6);
        assert_eq!(triples[5].0, 11);
        for w in s.windows(2) {
            assert!(w[0].steps <= w[1].steps);
            assert!(w[0].samples <= w[1].samples);
            assert!(w[0].delta >= w[1].delta);
        }
        assert_eq!(common_refinement(s.iter().map(|e| e.steps)), 264);
    }

    #[test]
    fn slope_of_power_law() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let es: Vec<f64> = hs.iter().map(|h: &f64| 3.0 * h.powf(1.5)).collect();
        assert!((loglog_slope(&hs, &es).unwrap() - 1.5).abs() < 1e-12);
        assert!(loglog_slope(&hs[..1], &es[..1]).is_err());
    }

    #[test]
    fn oracle_against_itself_is_zero() {
        let p = LinearParams::default();
        let prob = linear_problem(p).unwrap();
        let grid = make_grid(0.25, 10).unwrap();
        let b = sample_b_path(4, &grid, 1);
        let batch = simulate_forward(&prob, sample_w_batch(5, &grid, 1, 500), &[100.0]).unwrap();
        let oracle = LinearOracle {
            params: p,
            b_path: b.clone(),
        };
        let report = error_vs_oracle(&oracle, &batch, &b, &p).unwrap();
        assert!(report.total <= 1e-20);
    }

    #[test]
    fn error_invariant_under_sample_permutation() {
        let p = LinearParams::default();
        let prob = linear_problem(p).unwrap();
        let grid = make_grid(0.25, 8).unwrap();
        let b = sample_b_path(4, &grid, 1);
        let w = sample_w_batch(5, &grid, 1, 400);
        let reversed: Vec<f64> = (0..400).rev().flat_map(|m| w.sample(m).to_vec()).collect();
        let w_rev = WBatch::from_increments(grid, 1, 400, reversed).unwrap();
        let config = SolverConfig::new(8, 400, 5.0, Domain::fixed_1d(40.0, 180.0));
        let report = |w: WBatch| {
            let batch = simulate_forward(&prob, w, &[100.0]).unwrap();
            let sol = solve_on_paths(&prob, &config, &b, &batch).unwrap();
            error_vs_oracle(&sol, &batch, &b, &p).unwrap()
        };
        let a = report(w);
        let c = report(w_rev);
        assert!(((a.total - c.total) / a.total).abs() < 1e-9);
        assert!(a.y_error >= 0.0 && a.z_error >= 0.0);
    }
}
