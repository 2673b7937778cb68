//! Gaussian noise processes: covariance kernels, the dephasing integral
//! `beta(t) = int_0^t int_0^t K(s, s') ds ds'`, its inverse, and exact-in-law
//! path samplers for Monte Carlo.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::numerics::{find_root, Tolerance};

/// A zero-mean Gaussian noise process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessSpec {
    /// Ornstein-Uhlenbeck with kernel `(gamma/2) exp(-gamma |t - s|)`.
    OrnsteinUhlenbeck { gamma: f64 },
    /// Kernel `(|t|^2H + |s|^2H - |t - s|^2H) / 2` with Hurst exponent `h`.
    FractionalGaussian { h: f64 },
    /// Brownian motion, the `h = 1/2` member of the fractional family.
    Wiener,
    /// The `gamma -> inf` limit of OU, described only through `beta(t) = t`.
    WhiteNoise,
}

impl ProcessSpec {
    pub fn ornstein_uhlenbeck(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(domain("gamma", gamma, "(0, inf)"));
        }
        Ok(Self::OrnsteinUhlenbeck { gamma })
    }

    pub fn fractional_gaussian(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(domain("H", h, "(0, 1)"));
        }
        Ok(Self::FractionalGaussian { h })
    }

    /// Hurst exponent for the fractional family, Wiener included.
    fn hurst(&self) -> Option<f64> {
        match *self {
            Self::FractionalGaussian { h } => Some(h),
            Self::Wiener => Some(0.5),
            _ => None,
        }
    }
}

impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrnsteinUhlenbeck { gamma } => write!(f, "ou:gamma={gamma}"),
            Self::FractionalGaussian { h } => write!(f, "fgn:h={h}"),
            Self::Wiener => f.write_str("wiener"),
            Self::WhiteNoise => f.write_str("white"),
        }
    }
}

/// Error from the `name[:key=value,...]` process grammar.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid process spec `{input}`: {reason} (offending token `{token}`)")]
pub struct ParseProcessError {
    pub input: String,
    pub token: String,
    pub reason: String,
}

impl FromStr for ProcessSpec {
    type Err = ParseProcessError;

    /// Parses `ou[:gamma=G]`, `fgn[:h=H]`, `wiener` or `white`. Omitted
    /// parameters default to `gamma = 1` and `h = 1/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |token: &str, reason: &str| ParseProcessError {
            input: s.to_string(),
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name.trim(), Some(params)),
            None => (s.trim(), None),
        };
        let mut pairs = Vec::new();
        if let Some(params) = params {
            for item in params.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| fail(item, "expected key=value"))?;
                let value: f64 = v.trim().parse().map_err(|_| fail(v, "not a number"))?;
                pairs.push((k.trim().to_ascii_lowercase(), value, item));
            }
        }
        let single = |key: &str, default: f64| -> Result<f64, ParseProcessError> {
            let mut value = default;
            for (k, v, item) in &pairs {
                if k == key {
                    value = *v;
                } else {
                    return Err(fail(item, &format!("unknown parameter for `{name}`")));
                }
            }
            Ok(value)
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "ou" => Self::ornstein_uhlenbeck(single("gamma", 1.0)?),
            "fgn" => Self::fractional_gaussian(single("h", 0.5)?),
            "wiener" => {
                single("", 0.0)?;
                Ok(Self::Wiener)
            }
            "white" => {
                single("", 0.0)?;
                Ok(Self::WhiteNoise)
            }
            _ => {
                return Err(fail(
                    name,
                    "unknown process (expected ou, fgn, wiener or white)",
                ))
            }
        };
        spec.map_err(|e| fail(params.unwrap_or(name), &e.to_string()))
    }
}

/// Uniform grid `t_k = k * t_max / n_steps`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(domain("t_max", t_max, "(0, inf)"));
        }
        if n_steps == 0 {
            return Err(domain("n_steps", 0.0, "[1, inf)"));
        }
        Ok(Self { t_max, n_steps })
    }

    /// Grid over `[0, t]` with `ceil(density * t)` steps (at least one).
    pub fn with_density(t: f64, density: usize) -> Result<Self> {
        let n = (density as f64 * t).ceil().max(1.0) as usize;
        Self::new(t, n)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k >= self.n_steps {
            self.t_max
        } else {
            k as f64 * self.t_max / self.n_steps as f64
        }
    }

    /// All `n_steps + 1` nodes, starting at exactly 0 and ending at exactly `t_max`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|k| self.node(k))
    }
}

/// Source of independent standard normal deviates.
pub trait NormalSource {
    fn standard_normal(&mut self) -> f64;
}

/// Seeded ChaCha8 stream. Sub-streams forked by index depend only on
/// `(seed, index)`, never on how much of the parent has been consumed.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fork(&self, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // stream 0 belongs to the parent
        rng.set_stream(index.wrapping_add(1));
        Self {
            seed: self.seed,
            rng,
        }
    }

    pub fn exp1(&mut self) -> f64 {
        Exp1.sample(&mut self.rng)
    }
}

impl NormalSource for SeededRng {
    fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

/// Covariance `K(t, s)` of the process.
pub fn covariance(spec: ProcessSpec, t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "[0, inf)"));
    }
    if !(s >= 0.0) {
        return Err(domain("s", s, "[0, inf)"));
    }
    match spec {
        ProcessSpec::OrnsteinUhlenbeck { gamma } => {
            Ok(0.5 * gamma * (-gamma * (t - s).abs()).exp())
        }
        ProcessSpec::WhiteNoise => Err(Error::Unsupported("covariance kernel")),
        _ => {
            let two_h = 2.0 * spec.hurst().expect("fractional family");
            Ok(0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h)))
        }
    }
}

/// `exp(-x) - 1 + x` without cancellation for small `x`.
fn exp_neg_remainder(x: f64) -> f64 {
    if x < 0.1 {
        // alternating series x^2/2 - x^3/6 + ...; terms fall below 1e-18 by k = 14
        let mut term = 0.5 * x * x;
        let mut sum = 0.0;
        for k in 3..=16 {
            sum += term;
            term *= -x / k as f64;
        }
        sum
    } else {
        (-x).exp_m1() + x
    }
}

/// Dephasing integral `beta(t)`: the double time integral of the kernel.
pub fn beta(spec: ProcessSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "[0, inf)"));
    }
    Ok(match spec {
        ProcessSpec::OrnsteinUhlenbeck { gamma } => exp_neg_remainder(gamma * t) / gamma,
        ProcessSpec::WhiteNoise => t,
        _ => {
            let p = 2.0 * spec.hurst().expect("fractional family") + 2.0;
            t.powf(p) / p
        }
    })
}

/// Time at which `beta` reaches `b`.
pub fn beta_inverse(spec: ProcessSpec, b: f64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(domain("b", b, "[0, inf)"));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    if b.is_infinite() {
        return Ok(f64::INFINITY);
    }
    match spec {
        ProcessSpec::OrnsteinUhlenbeck { gamma } => {
            // beta(t) >= t - 1/gamma, so b + 2/gamma brackets the root with margin
            let hi = b + 2.0 / gamma;
            let tol = Tolerance {
                abs_tol: 1e-15 * hi.max(1.0),
                max_iter: 200,
            };
            find_root(|t| exp_neg_remainder(gamma * t) / gamma - b, 0.0, hi, tol)
        }
        ProcessSpec::WhiteNoise => Ok(b),
        _ => {
            let p = 2.0 * spec.hurst().expect("fractional family") + 2.0;
            Ok((p * b).powf(p.recip()))
        }
    }
}

/// Maximum relative diagonal jitter tried when a covariance factorization fails.
pub const CHOLESKY_JITTER: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Sampler {
    /// Stationary AR(1): `B_{k+1} = rho B_k + innovation * xi`.
    Ou {
        rho: f64,
        stationary_sd: f64,
        innovation_sd: f64,
    },
    /// Lower Cholesky factor of the covariance on nodes `t_1..t_n`; `B(0) = 0`.
    Cholesky { factor: DMatrix<f64> },
}

/// Reusable exact-in-law sampler of a process on a fixed grid.
#[derive(Debug, Clone)]
pub struct PathSampler {
    grid: TimeGrid,
    sampler: Sampler,
}

impl PathSampler {
    pub fn new(spec: ProcessSpec, grid: TimeGrid) -> Result<Self> {
        let sampler = match spec {
            ProcessSpec::WhiteNoise => return Err(Error::Unsupported("path sampling")),
            ProcessSpec::OrnsteinUhlenbeck { gamma } => {
                let variance = 0.5 * gamma;
                let rho = (-gamma * grid.step()).exp();
                // 1 - rho^2 = -expm1(-2 gamma dt)
                let innovation = variance * -(-2.0 * gamma * grid.step()).exp_m1();
                Sampler::Ou {
                    rho,
                    stationary_sd: variance.sqrt(),
                    innovation_sd: innovation.sqrt(),
                }
            }
            _ => Sampler::Cholesky {
                factor: covariance_factor(spec, &grid)?,
            },
        };
        Ok(Self { grid, sampler })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// One path at all `n_steps + 1` grid nodes, `t_0 = 0` included.
    pub fn sample<R: NormalSource + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.grid.n_steps();
        let mut path = Vec::with_capacity(n + 1);
        match &self.sampler {
            Sampler::Ou {
                rho,
                stationary_sd,
                innovation_sd,
            } => {
                let mut b = stationary_sd * rng.standard_normal();
                path.push(b);
                for _ in 0..n {
                    b = rho * b + innovation_sd * rng.standard_normal();
                    path.push(b);
                }
            }
            Sampler::Cholesky { factor } => {
                let xi: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
                path.push(0.0);
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, x) in xi.iter().enumerate().take(i + 1) {
                        acc += factor[(i, j)] * x;
                    }
                    path.push(acc);
                }
            }
        }
        path
    }

    /// Trapezoid integral of one sampled path over the whole grid.
    pub fn sample_phase<R: NormalSource + ?Sized>(&self, rng: &mut R) -> f64 {
        let path = self.sample(rng);
        trapezoid(&path, self.grid.step())
    }
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dt * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

fn covariance_factor(spec: ProcessSpec, grid: &TimeGrid) -> Result<DMatrix<f64>> {
    let n = grid.n_steps();
    let nodes: Vec<f64> = (1..=n).map(|k| grid.node(k)).collect();
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let c = covariance(spec, nodes[i], nodes[j])?;
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    if let Some(chol) = cov.clone().cholesky() {
        return Ok(chol.l());
    }
    let max_diag = cov.diagonal().max();
    for i in 0..n {
        cov[(i, i)] += CHOLESKY_JITTER * max_diag;
    }
    cov.cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite(n))
}

/// Samples the process on every node of `grid`.
pub fn sample_path<R: NormalSource + ?Sized>(
    spec: ProcessSpec,
    grid: TimeGrid,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(PathSampler::new(spec, grid)?.sample(rng))
}

/// Samples the accumulated phase `phi(t) = int_0^t B(s) ds`.
///
/// Paths are integrated with the trapezoid rule on `grid`, which must end at
/// `t`. White noise is drawn directly as `N(0, t)`.
pub fn sample_phase<R: NormalSource + ?Sized>(
    spec: ProcessSpec,
    t: f64,
    grid: TimeGrid,
    rng: &mut R,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "[0, inf)"));
    }
    if spec == ProcessSpec::WhiteNoise {
        return Ok(t.sqrt() * rng.standard_normal());
    }
    if (grid.t_max() - t).abs() > 1e-12 * t.max(1.0) {
        return Err(domain("t", t, "grid end point"));
    }
    Ok(PathSampler::new(spec, grid)?.sample_phase(rng))
}
