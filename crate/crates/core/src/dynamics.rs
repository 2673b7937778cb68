//! Time evolution of Bell mixtures under classical dephasing noise.
//!
//! Each qubit evolves as `exp(-i [w0 t + lambda phi_i(t)] sigma_z)` with
//! `phi_i = int_0^t B_i`. Averaging over Gaussian noise damps the
//! `|00><11|` coherence by `exp(-4 lambda^2 beta)` (independent noises) or
//! `exp(-8 lambda^2 beta)` (one shared noise). The `|01><10|` coherence damps
//! by `exp(-4 lambda^2 beta)` for independent noises and not at all for a
//! shared one.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::processes::{beta, NormalSource, PathSampler, ProcessSpec, SeededRng, TimeGrid};
use crate::states::{
    c_to_a, density_matrix, negativity_bell_mixture, BellMixture, BlochDiagonal, TwoQubitDensity,
};

/// Whether the two qubits see independent noise realizations or one shared one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvTopology {
    Independent,
    Common,
}

impl EnvTopology {
    /// Bound constant `A`: 1 for independent environments, 2 for a common one.
    pub fn bound_constant(self) -> u32 {
        match self {
            Self::Independent => 1,
            Self::Common => 2,
        }
    }

    /// Multiplier `k` in the damping exponent `k lambda^2 beta`.
    pub fn exponent_factor(self) -> f64 {
        4.0 * self.bound_constant() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    lambda: f64,
    omega0: f64,
    spec: ProcessSpec,
    env: EnvTopology,
}

impl EvolutionParams {
    pub fn new(spec: ProcessSpec, env: EnvTopology, lambda: f64, omega0: f64) -> Result<Self> {
        // lambda = 0 decouples the noise; allowed for oracle checks
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(domain("lambda", lambda, "[0, inf)"));
        }
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return Err(domain("omega0", omega0, "[0, inf)"));
        }
        Ok(Self {
            lambda,
            omega0,
            spec,
            env,
        })
    }

    /// `lambda = 1`, `omega0 = 1`.
    pub fn with_defaults(spec: ProcessSpec, env: EnvTopology) -> Self {
        Self {
            lambda: 1.0,
            omega0: 1.0,
            spec,
            env,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn spec(&self) -> ProcessSpec {
        self.spec
    }

    pub fn env(&self) -> EnvTopology {
        self.env
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.spec, self.env, lambda, self.omega0)
    }

    pub fn with_omega0(self, omega0: f64) -> Result<Self> {
        Self::new(self.spec, self.env, self.lambda, omega0)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain("t", t, "[0, inf)"));
    }
    Ok(())
}

/// Damping of the `|00><11|` coherence at time `t`.
pub fn dephasing_factor(p: &EvolutionParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let b = beta(p.spec, t)?;
    Ok((-p.env.exponent_factor() * p.lambda * p.lambda * b).exp())
}

/// Noise-averaged state at time `t`.
pub fn evolve(m: &BellMixture, p: &EvolutionParams, t: f64) -> Result<TwoQubitDensity> {
    let x = dephasing_factor(p, t)?;
    let inner_damping = match p.env {
        EnvTopology::Independent => x,
        EnvTopology::Common => 1.0,
    };
    let mut rho = *density_matrix(m).entries();
    let phase = 4.0 * p.omega0 * t;
    let rotation = Complex64::from_polar(1.0, -phase);
    rho[0][3] = rho[0][3] * x * rotation;
    rho[3][0] = rho[3][0] * x * rotation.conj();
    rho[1][2] *= inner_damping;
    rho[2][1] *= inner_damping;
    Ok(TwoQubitDensity::from_x_entries(rho))
}

/// Bloch coordinates at time `t`, in the frame co-rotating with `omega0`.
pub fn evolve_bloch(b: &BlochDiagonal, p: &EvolutionParams, t: f64) -> Result<BlochDiagonal> {
    let x = dephasing_factor(p, t)?;
    let [a1, a2, a3] = b.components();
    let a = match p.env {
        EnvTopology::Independent => [a1 * x, a2 * x, a3],
        EnvTopology::Common => [
            0.5 * (x * (a1 - a2) + a1 + a2),
            0.5 * (x * (a2 - a1) + a1 + a2),
            a3,
        ],
    };
    BlochDiagonal::new(a)
}

/// Negativity at time `t`; independent of `omega0`.
pub fn negativity_at(m: &BellMixture, p: &EvolutionParams, t: f64) -> Result<f64> {
    negativity_bell_mixture(m, dephasing_factor(p, t)?, p.env)
}

/// Default number of quadrature nodes per unit time for Monte Carlo phases.
pub const DEFAULT_GRID_DENSITY: usize = 256;

/// Paths summed sequentially per work unit. Fixed, so the floating-point
/// reduction order does not depend on the worker count.
const MC_CHUNK: usize = 64;

type Matrix4 = [[Complex64; 4]; 4];

enum PhaseSource {
    Trivial,
    White { sd: f64 },
    Paths(PathSampler),
}

impl PhaseSource {
    fn draw<R: NormalSource>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Trivial => 0.0,
            Self::White { sd } => sd * rng.standard_normal(),
            Self::Paths(sampler) => sampler.sample_phase(rng),
        }
    }
}

/// Adds `U rho0 U^dagger` for one realization, where `U` multiplies `|q1 q2>`
/// by `exp(-i (s1 theta1 + s2 theta2))` with `s = +1` for `|0>`, `-1` for `|1>`.
fn accumulate_realization(acc: &mut Matrix4, rho0: &Matrix4, theta1: f64, theta2: f64) {
    let mut u = [Complex64::ZERO; 4];
    for (k, slot) in u.iter_mut().enumerate() {
        let s1 = if k & 2 == 0 { 1.0 } else { -1.0 };
        let s2 = if k & 1 == 0 { 1.0 } else { -1.0 };
        *slot = Complex64::from_polar(1.0, -(s1 * theta1 + s2 * theta2));
    }
    for i in 0..4 {
        for j in 0..4 {
            if rho0[i][j] != Complex64::ZERO {
                acc[i][j] += u[i] * rho0[i][j] * u[j].conj();
            }
        }
    }
}

/// Monte Carlo average of `U(t) rho0 U(t)^dagger` over `samples` noise
/// realizations.
///
/// Realization `k` draws its phases from `rng.fork(k)`, and partial sums are
/// combined in index order, so the result is bit-identical for any rayon
/// thread count.
pub fn mc_evolve(
    m: &BellMixture,
    p: &EvolutionParams,
    t: f64,
    samples: usize,
    grid_density: usize,
    rng: &SeededRng,
) -> Result<TwoQubitDensity> {
    check_time(t)?;
    if samples == 0 {
        return Err(domain("samples", 0.0, "[1, inf)"));
    }
    if grid_density == 0 {
        return Err(domain("grid_density", 0.0, "[1, inf)"));
    }
    let source = if t == 0.0 || p.lambda == 0.0 {
        PhaseSource::Trivial
    } else if p.spec == ProcessSpec::WhiteNoise {
        PhaseSource::White {
            sd: beta(p.spec, t)?.sqrt(),
        }
    } else {
        PhaseSource::Paths(PathSampler::new(
            p.spec,
            TimeGrid::with_density(t, grid_density)?,
        )?)
    };
    let rho0 = *density_matrix(m).entries();
    let drift = p.omega0 * t;

    let n_chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<Matrix4> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = [[Complex64::ZERO; 4]; 4];
            let end = ((chunk + 1) * MC_CHUNK).min(samples);
            for k in chunk * MC_CHUNK..end {
                let mut stream = rng.fork(k as u64);
                let phi1 = source.draw(&mut stream);
                let phi2 = match p.env {
                    EnvTopology::Independent => source.draw(&mut stream),
                    EnvTopology::Common => phi1,
                };
                accumulate_realization(
                    &mut acc,
                    &rho0,
                    drift + p.lambda * phi1,
                    drift + p.lambda * phi2,
                );
            }
            acc
        })
        .collect();

    let mut total = [[Complex64::ZERO; 4]; 4];
    for part in &partials {
        for i in 0..4 {
            for j in 0..4 {
                total[i][j] += part[i][j];
            }
        }
    }
    let scale = 1.0 / samples as f64;
    for row in total.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    Ok(TwoQubitDensity::from_x_entries(total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub bloch: BlochDiagonal,
    pub negativity: f64,
}

/// Bloch coordinates and negativity at every node of `grid`.
pub fn trajectory(
    m: &BellMixture,
    p: &EvolutionParams,
    grid: &TimeGrid,
) -> Result<Vec<TrajectoryPoint>> {
    let b0 = c_to_a(m);
    grid.nodes()
        .map(|t| {
            Ok(TrajectoryPoint {
                t,
                bloch: evolve_bloch(&b0, p, t)?,
                negativity: negativity_at(m, p, t)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::negativity;

    fn params(spec: ProcessSpec, env: EnvTopology) -> EvolutionParams {
        EvolutionParams::with_defaults(spec, env)
    }

    #[test]
    fn dephasing_factor_examples() {
        let ind = params(ProcessSpec::WhiteNoise, EnvTopology::Independent);
        let com = params(ProcessSpec::WhiteNoise, EnvTopology::Common);
        assert_eq!(dephasing_factor(&ind, 0.0).unwrap(), 1.0);
        assert!((dephasing_factor(&ind, 0.25).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        assert!((dephasing_factor(&com, 0.25).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        assert!(dephasing_factor(&ind, -1.0).is_err());
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let m = BellMixture::new([0.4, 0.1, 0.3, 0.2]).unwrap();
        for env in [EnvTopology::Independent, EnvTopology::Common] {
            let p = params(ProcessSpec::Wiener, env);
            assert_eq!(evolve(&m, &p, 0.0).unwrap(), density_matrix(&m));
        }
    }

    #[test]
    fn evolve_phi_plus_independent() {
        let p =
            EvolutionParams::new(ProcessSpec::Wiener, EnvTopology::Independent, 1.0, 0.0).unwrap();
        let t = 0.7;
        let x = (-4.0 * beta(ProcessSpec::Wiener, t).unwrap()).exp();
        let rho = evolve(&BellMixture::PHI_PLUS, &p, t).unwrap();
        assert_eq!(rho.get(0, 0).re, 0.5);
        assert_eq!(rho.get(3, 3).re, 0.5);
        assert!((rho.get(0, 3) - Complex64::new(0.5 * x, 0.0)).norm() < 1e-16);
        assert!((rho.get(3, 0) - Complex64::new(0.5 * x, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn outer_coherence_rotates_with_omega0() {
        let p =
            EvolutionParams::new(ProcessSpec::WhiteNoise, EnvTopology::Common, 1.0, 1.5).unwrap();
        let t = 0.3;
        let rho = evolve(&BellMixture::PHI_PLUS, &p, t).unwrap();
        let y = (-8.0 * t).exp();
        let expected = Complex64::from_polar(0.5 * y, -4.0 * 1.5 * t);
        assert!((rho.get(0, 3) - expected).norm() < 1e-15);
        assert!((rho.get(3, 0) - expected.conj()).norm() < 1e-15);
    }

    #[test]
    fn psi_plus_is_stable_in_common_environment() {
        let p = params(
            ProcessSpec::fractional_gaussian(0.9).unwrap(),
            EnvTopology::Common,
        );
        for t in [0.1, 1.0, 10.0] {
            assert_eq!(
                evolve(&BellMixture::PSI_PLUS, &p, t).unwrap(),
                density_matrix(&BellMixture::PSI_PLUS)
            );
        }
    }

    #[test]
    fn bloch_examples() {
        let b = BlochDiagonal::new([1.0, -1.0, 1.0]).unwrap();
        // white noise with t chosen so the factor is exactly 1/2
        let ind = EvolutionParams::new(ProcessSpec::WhiteNoise, EnvTopology::Independent, 1.0, 0.0)
            .unwrap();
        let t = 2f64.ln() / 4.0;
        let out = evolve_bloch(&b, &ind, t).unwrap().components();
        assert!((out[0] - 0.5).abs() < 1e-15 && (out[1] + 0.5).abs() < 1e-15);
        assert_eq!(out[2], 1.0);

        let com =
            EvolutionParams::new(ProcessSpec::WhiteNoise, EnvTopology::Common, 1.0, 0.0).unwrap();
        let t = 2f64.ln() / 8.0;
        let out = evolve_bloch(&b, &com, t).unwrap().components();
        assert!((out[0] - 0.5).abs() < 1e-15 && (out[1] + 0.5).abs() < 1e-15);
        assert_eq!(out[2], 1.0);

        assert_eq!(evolve_bloch(&b, &com, 0.0).unwrap(), b);
    }

    #[test]
    fn bell_negativity_decays_as_dephasing_factor() {
        let spec = ProcessSpec::ornstein_uhlenbeck(1.0).unwrap();
        for env in [EnvTopology::Independent, EnvTopology::Common] {
            let p = params(spec, env);
            for t in [0.1, 0.5, 2.0] {
                let n = negativity_at(&BellMixture::PHI_PLUS, &p, t).unwrap();
                let expected = (-env.exponent_factor() * beta(spec, t).unwrap()).exp();
                assert!((n - expected).abs() < 1e-15);
            }
        }
        let m = BellMixture::new([0.0, 0.0, 0.6, 0.4]).unwrap();
        let p = params(spec, EnvTopology::Common);
        for t in [0.0, 1.0, 50.0] {
            assert!((negativity_at(&m, &p, t).unwrap() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn decoupled_noise_gives_exact_rotation() {
        let m = BellMixture::new([0.6, 0.1, 0.2, 0.1]).unwrap();
        let p = EvolutionParams::new(
            ProcessSpec::ornstein_uhlenbeck(1.0).unwrap(),
            EnvTopology::Independent,
            0.0,
            1.0,
        )
        .unwrap();
        let mc = mc_evolve(&m, &p, 0.8, 200, 64, &SeededRng::new(1)).unwrap();
        let exact = evolve(&m, &p, 0.8).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((mc.get(i, j) - exact.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mc_phi_plus_corner_coherence() {
        let spec = ProcessSpec::ornstein_uhlenbeck(1.0).unwrap();
        let p = EvolutionParams::new(spec, EnvTopology::Independent, 1.0, 1.0).unwrap();
        let m = 10_000;
        let rho = mc_evolve(&BellMixture::PHI_PLUS, &p, 1.0, m, 256, &SeededRng::new(42)).unwrap();
        let expected = 0.5 * (-4.0 * (-1.0f64).exp()).exp();
        let budget = 4.0 * 0.5 / (m as f64).sqrt();
        assert!((rho.get(0, 3).norm() - expected).abs() < budget);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(negativity(&rho) > 0.0);
    }

    #[test]
    fn trajectory_keeps_a3() {
        let m = BellMixture::new([0.5, 0.1, 0.3, 0.1]).unwrap();
        let a3 = c_to_a(&m).components()[2];
        let grid = TimeGrid::new(5.0, 50).unwrap();
        for env in [EnvTopology::Independent, EnvTopology::Common] {
            let pts = trajectory(&m, &params(ProcessSpec::Wiener, env), &grid).unwrap();
            assert_eq!(pts.len(), 51);
            assert!(pts.iter().all(|pt| pt.bloch.components()[2] == a3));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(EvolutionParams::new(ProcessSpec::Wiener, EnvTopology::Common, -1.0, 1.0).is_err());
        assert!(EvolutionParams::new(ProcessSpec::Wiener, EnvTopology::Common, 1.0, -1.0).is_err());
        let p = params(ProcessSpec::Wiener, EnvTopology::Common);
        let m = BellMixture::PHI_PLUS;
        assert!(mc_evolve(&m, &p, 1.0, 0, 256, &SeededRng::new(0)).is_err());
        assert!(mc_evolve(&m, &p, 1.0, 10, 0, &SeededRng::new(0)).is_err());
    }
}
