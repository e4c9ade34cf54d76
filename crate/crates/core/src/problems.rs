//! Coefficient bundles `(b, σ, f, g, Φ)` and the built-in test problems.
//!
//! Shapes: `x ∈ R^d`, `y ∈ R^k`, `z ∈ R^{k×d}` and `g ∈ R^{k×l}`, matrices
//! stored row-major. The forward coefficients are autonomous.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type StateFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type CouplingFn = Arc<dyn Fn(f64, &[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// `(d, k, l)`: forward, backward and backward-noise dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub d: usize,
    pub k: usize,
    pub l: usize,
}

impl Dims {
    pub fn scalar() -> Self {
        Self { d: 1, k: 1, l: 1 }
    }
}

/// Negative part `a^- = max(0, -a)`.
pub fn negative_part(a: f64) -> f64 {
    (-a).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearParams {
    pub a0: f64,
    pub b0: f64,
    pub strike: f64,
    pub mu: f64,
    pub sigma: f64,
    pub x0: f64,
    pub horizon: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self {
            a0: 0.5,
            b0: 0.5,
            strike: 115.0,
            mu: 0.05,
            sigma: 0.2,
            x0: 100.0,
            horizon: 0.25,
        }
    }
}

/// Black–Scholes market with distinct lending rate `r` and borrowing rate `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinanceParams {
    pub mu: f64,
    pub sigma: f64,
    pub r: f64,
    pub borrow_rate: f64,
    pub strike: f64,
    pub x0: f64,
    pub horizon: f64,
}

impl Default for FinanceParams {
    fn default() -> Self {
        Self {
            mu: 0.05,
            sigma: 0.2,
            r: 0.01,
            borrow_rate: 0.06,
            strike: 115.0,
            x0: 100.0,
            horizon: 0.25,
        }
    }
}

impl FinanceParams {
    /// Market price of risk `θ = (μ - r) / σ`.
    pub fn theta(&self) -> f64 {
        (self.mu - self.r) / self.sigma
    }

    /// The driver `f(y, z) = -θz - ry + (y - z/σ)^- (R - r)`.
    pub fn driver(&self, y: f64, z: f64) -> f64 {
        -self.theta() * z - self.r * y
            + negative_part(y - z / self.sigma) * (self.borrow_rate - self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseVariant {
    /// `g1(x, y, z) = 0.1 z + 0.5 y + log x`
    G1,
    /// `g2(y, z) = 0.1 z + 0.5 y`
    G2,
    /// `g3(x, y) = log x + 0.5 y`
    G3,
}

impl NoiseVariant {
    pub fn uses_log(self) -> bool {
        matches!(self, NoiseVariant::G1 | NoiseVariant::G3)
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseVariant::G1 => "g1",
            NoiseVariant::G2 => "g2",
            NoiseVariant::G3 => "g3",
        }
    }

    /// Evaluates the variant with `x` already restricted to the log domain.
    pub fn eval(self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            NoiseVariant::G1 => 0.1 * z + 0.5 * y + x.ln(),
            NoiseVariant::G2 => 0.1 * z + 0.5 * y,
            NoiseVariant::G3 => x.ln() + 0.5 * y,
        }
    }
}

/// Which family a problem belongs to; determines oracle availability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProblemKind {
    Linear(LinearParams),
    Finance {
        params: FinanceParams,
        variant: NoiseVariant,
        log_domain: [f64; 2],
    },
    Custom,
}

/// Counters updated while coefficients are evaluated.
#[derive(Debug, Default)]
pub struct Diagnostics {
    log_clamps: AtomicU64,
}

impl Diagnostics {
    pub fn log_clamps(&self) -> u64 {
        self.log_clamps.load(Ordering::Relaxed)
    }
}

/// A decoupled forward–backward doubly stochastic system.
#[derive(Clone)]
pub struct Problem {
    name: String,
    dims: Dims,
    drift: StateFn,
    diffusion: StateFn,
    driver: CouplingFn,
    noise: CouplingFn,
    noise_vanishes: bool,
    terminal: StateFn,
    contraction: f64,
    x0: Vec<f64>,
    horizon: f64,
    kind: ProblemKind,
    diagnostics: Arc<Diagnostics>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("contraction", &self.contraction)
            .field("x0", &self.x0)
            .field("horizon", &self.horizon)
            .field("kind", &self.kind)
            .field("noise_vanishes", &self.noise_vanishes)
            .finish()
    }
}

impl Problem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn contraction(&self) -> f64 {
        self.contraction
    }

    /// `false` when the contraction constant is not below one.
    pub fn is_conforming(&self) -> bool {
        self.contraction < 1.0
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Whether `g` has been replaced by the zero map.
    pub fn noise_vanishes(&self) -> bool {
        self.noise_vanishes
    }

    /// `b(x)`, length `d`.
    pub fn drift(&self, x: &[f64]) -> Vec<f64> {
        (self.drift)(x)
    }

    /// `σ(x)`, `d × d` row-major.
    pub fn diffusion(&self, x: &[f64]) -> Vec<f64> {
        (self.diffusion)(x)
    }

    /// `f(t, x, y, z)`, length `k`.
    pub fn driver(&self, t: f64, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        (self.driver)(t, x, y, z)
    }

    /// `g(t, x, y, z)`, `k × l` row-major.
    pub fn noise(&self, t: f64, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        (self.noise)(t, x, y, z)
    }

    /// `Φ(x)`, length `k`.
    pub fn terminal(&self, x: &[f64]) -> Vec<f64> {
        (self.terminal)(x)
    }

    /// The same problem with `g ≡ 0`: the plain backward SDE.
    pub fn without_noise(&self) -> Problem {
        let size = self.dims.k * self.dims.l;
        let mut out = self.clone();
        out.noise = Arc::new(move |_, _, _, _| vec![0.0; size]);
        out.noise_vanishes = true;
        out.name = format!("{}-bsde", self.name);
        out
    }

    /// Replaces the initial point, keeping the coefficients.
    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Problem> {
        if x0.len() != self.dims.d {
            return Err(Error::dims("x0", self.dims.d, x0.len()));
        }
        self.x0 = x0;
        Ok(self)
    }

    fn validate(self) -> Result<Self> {
        let Dims { d, k, l } = self.dims;
        if d == 0 || k == 0 || l == 0 {
            return Err(Error::InvalidProblem(format!(
                "dimensions must be >= 1, got d={d}, k={k}, l={l}"
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.x0.len() != d {
            return Err(Error::dims("x0", d, self.x0.len()));
        }
        if !(self.contraction >= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "contraction constant must be >= 0, got {}",
                self.contraction
            )));
        }
        if !self.is_conforming() {
            log::warn!(
                "problem `{}` has contraction constant {} >= 1; run will be flagged non-conforming",
                self.name,
                self.contraction
            );
        }
        let x = self.x0.clone();
        let y = vec![0.0; k];
        let z = vec![0.0; k * d];
        let probes: [(&str, Vec<f64>, usize); 5] = [
            ("drift b", self.drift(&x), d),
            ("diffusion σ", self.diffusion(&x), d * d),
            ("driver f", self.driver(0.0, &x, &y, &z), k),
            ("noise g", self.noise(self.horizon, &x, &y, &z), k * l),
            ("terminal Φ", self.terminal(&x), k),
        ];
        for (what, value, expected) in probes {
            if value.len() != expected {
                return Err(Error::dims(what, expected, value.len()));
            }
            if value.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "{what} is not finite at the probe point x0={x:?}"
                )));
            }
        }
        Ok(self)
    }
}

/// Closures and metadata for a user-defined problem.
pub struct CustomSpec {
    pub name: String,
    pub dims: Dims,
    pub drift: StateFn,
    pub diffusion: StateFn,
    pub driver: CouplingFn,
    pub noise: CouplingFn,
    pub terminal: StateFn,
    pub contraction: f64,
    pub x0: Vec<f64>,
    pub horizon: f64,
}

impl CustomSpec {
    /// A spec with every coefficient zero and `Φ ≡ 0`.
    pub fn zero(dims: Dims, x0: Vec<f64>, horizon: f64) -> Self {
        let Dims { d, k, l } = dims;
        Self {
            name: "custom".into(),
            dims,
            drift: Arc::new(move |_| vec![0.0; d]),
            diffusion: Arc::new(move |_| vec![0.0; d * d]),
            driver: Arc::new(move |_, _, _, _| vec![0.0; k]),
            noise: Arc::new(move |_, _, _, _| vec![0.0; k * l]),
            terminal: Arc::new(move |_| vec![0.0; k]),
            contraction: 0.0,
            x0,
            horizon,
        }
    }

    pub fn drift(mut self, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.drift = Arc::new(f);
        self
    }

    pub fn diffusion(mut self, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.diffusion = Arc::new(f);
        self
    }

    pub fn driver(
        mut self,
        f: impl Fn(f64, &[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.driver = Arc::new(f);
        self
    }

    pub fn noise(
        mut self,
        f: impl Fn(f64, &[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.noise = Arc::new(f);
        self
    }

    pub fn terminal(mut self, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.terminal = Arc::new(f);
        self
    }

    pub fn contraction(mut self, alpha: f64) -> Self {
        self.contraction = alpha;
        self
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Validates a user-defined coefficient bundle.
pub fn custom_problem(spec: CustomSpec) -> Result<Problem> {
    Problem {
        name: spec.name,
        dims: spec.dims,
        drift: spec.drift,
        diffusion: spec.diffusion,
        driver: spec.driver,
        noise: spec.noise,
        noise_vanishes: false,
        terminal: spec.terminal,
        contraction: spec.contraction,
        x0: spec.x0,
        horizon: spec.horizon,
        kind: ProblemKind::Custom,
        diagnostics: Arc::default(),
    }
    .validate()
}

/// Geometric Brownian motion with `Φ(x) = K - x`, `f = a0 y`, `g = b0 y`.
pub fn linear_problem(p: LinearParams) -> Result<Problem> {
    if !(p.sigma > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "linear problem needs sigma > 0, got {}",
            p.sigma
        )));
    }
    let LinearParams {
        a0,
        b0,
        strike,
        mu,
        sigma,
        ..
    } = p;
    Problem {
        name: "linear".into(),
        dims: Dims::scalar(),
        drift: Arc::new(move |x| vec![mu * x[0]]),
        diffusion: Arc::new(move |x| vec![sigma * x[0]]),
        driver: Arc::new(move |_, _, y, _| vec![a0 * y[0]]),
        noise: Arc::new(move |_, _, y, _| vec![b0 * y[0]]),
        noise_vanishes: false,
        terminal: Arc::new(move |x| vec![strike - x[0]]),
        contraction: 0.0,
        x0: vec![p.x0],
        horizon: p.horizon,
        kind: ProblemKind::Linear(p),
        diagnostics: Arc::default(),
    }
    .validate()
}

/// The differential-rates pricing driver with one of the three noise coefficients.
///
/// For the log variants `x` is clamped to `log_domain` before `log x` is taken;
/// each clamp is counted in [`Problem::diagnostics`].
pub fn finance_problem(
    p: FinanceParams,
    variant: NoiseVariant,
    log_domain: [f64; 2],
) -> Result<Problem> {
    if !(p.sigma > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "finance problem needs sigma > 0, got {}",
            p.sigma
        )));
    }
    if p.borrow_rate < p.r {
        return Err(Error::InvalidProblem(format!(
            "borrowing rate {} below lending rate {}",
            p.borrow_rate, p.r
        )));
    }
    let [lo, hi] = log_domain;
    if variant.uses_log() && !(lo > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "{} takes log x and needs a positive lower bound, got d1={lo}",
            variant.name()
        )));
    }
    if !(lo < hi) {
        return Err(Error::InvalidProblem(format!(
            "log domain must satisfy d1 < d2, got [{lo}, {hi}]"
        )));
    }
    let diagnostics = Arc::new(Diagnostics::default());
    let counter = Arc::clone(&diagnostics);
    let (mu, sigma, strike) = (p.mu, p.sigma, p.strike);
    let alpha = match variant {
        NoiseVariant::G1 | NoiseVariant::G2 => 0.1,
        NoiseVariant::G3 => 0.0,
    };
    Problem {
        name: format!("finance-{}", variant.name()),
        dims: Dims::scalar(),
        drift: Arc::new(move |x| vec![mu * x[0]]),
        diffusion: Arc::new(move |x| vec![sigma * x[0]]),
        driver: Arc::new(move |_, _, y, z| vec![p.driver(y[0], z[0])]),
        noise: Arc::new(move |_, x, y, z| {
            let mut xv = x[0];
            if variant.uses_log() && !(lo..=hi).contains(&xv) {
                counter.log_clamps.fetch_add(1, Ordering::Relaxed);
                xv = xv.clamp(lo, hi);
            }
            vec![variant.eval(xv, y[0], z[0])]
        }),
        noise_vanishes: false,
        terminal: Arc::new(move |x| vec![strike - x[0]]),
        contraction: alpha,
        x0: vec![p.x0],
        horizon: p.horizon,
        kind: ProblemKind::Finance {
            params: p,
            variant,
            log_domain,
        },
        diagnostics,
    }
    .validate()
}
