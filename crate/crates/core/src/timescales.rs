//! Entanglement-preserving and entanglement-survival times.
//!
//! Time enters the negativity only through the dephasing factor `x`, and
//! as a function of `x` the closed-form negativity of a Bell mixture reduces
//! to a single linear branch:
//!
//! ```text
//! independent:  N(x) = max(0, |c1 - c2| x - (c3 + c4), |c3 - c4| x - (c1 + c2))
//! common:       N(x) = max(0, |c1 - c2| x - (c3 + c4), |c3 - c4| - (c1 + c2))
//! ```
//!
//! (at most one branch can be positive). Threshold crossings are solved for
//! `x` exactly and mapped back to time through `beta^-1`.

use rayon::prelude::*;

use crate::dynamics::EnvTopology;
use crate::error::{domain, Error, Result};
use crate::numerics::lambert_w0;
use crate::processes::{beta_inverse, ProcessSpec, SeededRng};
use crate::states::{sample_random_mixture, BellMixture};

/// Fraction `r` of the initial negativity that defines the preserving time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRatio(f64);

impl ThresholdRatio {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(domain("r", r, "(0, 1)"));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `beta* = -ln(r) / 4`.
    pub fn beta_star(self) -> BetaStar {
        BetaStar(-0.25 * self.0.ln())
    }
}

impl Default for ThresholdRatio {
    fn default() -> Self {
        Self(0.99)
    }
}

/// Dephasing integral at which a Bell state keeps a fraction `r` of its negativity
/// (independent environments, unit coupling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaStar(f64);

impl BetaStar {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// When, if ever, a negativity threshold is crossed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvivalOutcome {
    FiniteTime(f64),
    /// Reached only in the `t -> inf` limit.
    Asymptotic,
    /// Negativity is constant in time.
    Never,
}

impl SurvivalOutcome {
    pub fn time(self) -> Option<f64> {
        match self {
            Self::FiniteTime(t) => Some(t),
            _ => None,
        }
    }

    /// Time, with `inf` for the non-finite outcomes.
    pub fn time_or_inf(self) -> f64 {
        self.time().unwrap_or(f64::INFINITY)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::FiniteTime(_) => "finite",
            Self::Asymptotic => "asymptotic",
            Self::Never => "never",
        }
    }
}

/// Negativity as a function of the dephasing factor.
#[derive(Debug, Clone, Copy, PartialEq)]
enum NegativityLaw {
    /// `N(x) = slope * x - offset`, with `slope > offset >= 0`.
    Linear {
        slope: f64,
        offset: f64,
    },
    Constant(f64),
}

fn negativity_law(m: &BellMixture, env: EnvTopology) -> Result<NegativityLaw> {
    let [c1, c2, c3, c4] = m.weights();
    let (phi_slope, phi_offset) = ((c1 - c2).abs(), c3 + c4);
    let (psi_slope, psi_offset) = ((c3 - c4).abs(), c1 + c2);
    if phi_slope > phi_offset {
        Ok(NegativityLaw::Linear {
            slope: phi_slope,
            offset: phi_offset,
        })
    } else if psi_slope > psi_offset {
        Ok(match env {
            EnvTopology::Independent => NegativityLaw::Linear {
                slope: psi_slope,
                offset: psi_offset,
            },
            EnvTopology::Common => NegativityLaw::Constant(psi_slope - psi_offset),
        })
    } else {
        Err(Error::NotEntangled(m.initial_negativity()))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain("lambda", lambda, "(0, inf)"));
    }
    Ok(())
}

/// Time at which the dephasing factor of `env` falls to `x`.
fn time_at_factor(x: f64, spec: ProcessSpec, lambda: f64, env: EnvTopology) -> Result<f64> {
    beta_inverse(spec, -x.ln() / (env.exponent_factor() * lambda * lambda))
}

/// Preserving time of a pure Bell state from the tabulated closed forms.
///
/// The threshold in `beta` is `beta* / (A lambda^2)`. OU inverts
/// `beta(t) = b` with `t = [gamma b + W0(-exp(-gamma b - 1)) + 1] / gamma`.
pub fn preserving_time_bell(
    spec: ProcessSpec,
    lambda: f64,
    r: ThresholdRatio,
    env: EnvTopology,
) -> Result<f64> {
    check_lambda(lambda)?;
    let b = r.beta_star().value() / (env.bound_constant() as f64 * lambda * lambda);
    Ok(match spec {
        ProcessSpec::OrnsteinUhlenbeck { gamma } => {
            let gb = gamma * b;
            (gb + lambert_w0(-(-gb - 1.0).exp())? + 1.0) / gamma
        }
        ProcessSpec::WhiteNoise => b,
        ProcessSpec::FractionalGaussian { h } => {
            let p = 2.0 * h + 2.0;
            (p * b).powf(p.recip())
        }
        ProcessSpec::Wiener => (3.0 * b).cbrt(),
    })
}

/// First time the negativity of `m` drops to `r` times its initial value.
///
/// Returns [`SurvivalOutcome::Never`] when the negativity is constant.
pub fn preserving_time(
    m: &BellMixture,
    spec: ProcessSpec,
    lambda: f64,
    r: ThresholdRatio,
    env: EnvTopology,
) -> Result<SurvivalOutcome> {
    check_lambda(lambda)?;
    match negativity_law(m, env)? {
        NegativityLaw::Constant(_) => Ok(SurvivalOutcome::Never),
        NegativityLaw::Linear { slope, offset } => {
            let n0 = slope - offset;
            let x_c = (r.value() * n0 + offset) / slope;
            Ok(SurvivalOutcome::FiniteTime(time_at_factor(
                x_c, spec, lambda, env,
            )?))
        }
    }
}

fn check_initial_negativity(n0: f64, allow_one: bool) -> Result<()> {
    let ok = n0 > 0.0 && (n0 < 1.0 || (allow_one && n0 == 1.0));
    if !ok {
        let range = if allow_one { "(0, 1]" } else { "(0, 1)" };
        return Err(domain("N0", n0, range));
    }
    Ok(())
}

/// `beta` threshold below which no state with initial negativity `n0` can
/// have lost the fraction `1 - r` of it.
pub fn tstar_lower_bound_beta(n0: f64, r: ThresholdRatio, env: EnvTopology) -> Result<f64> {
    check_initial_negativity(n0, true)?;
    let a = env.bound_constant() as f64;
    Ok(((n0 + 1.0) / (n0 * (2.0 * r.value() - 1.0) + 1.0)).ln() / (4.0 * a))
}

/// Lower bound on the preserving time of any mixture with initial negativity
/// `n0`; attained by mixtures of one `Phi` and one `Psi` state.
pub fn tstar_lower_bound(
    n0: f64,
    r: ThresholdRatio,
    env: EnvTopology,
    spec: ProcessSpec,
    lambda: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    let b = tstar_lower_bound_beta(n0, r, env)?;
    beta_inverse(spec, b / (lambda * lambda))
}

/// Time at which `m` becomes separable.
pub fn survival_time(
    m: &BellMixture,
    spec: ProcessSpec,
    lambda: f64,
    env: EnvTopology,
) -> Result<SurvivalOutcome> {
    check_lambda(lambda)?;
    match negativity_law(m, env)? {
        NegativityLaw::Constant(_) => Ok(SurvivalOutcome::Never),
        NegativityLaw::Linear { offset: 0.0, .. } => Ok(SurvivalOutcome::Asymptotic),
        NegativityLaw::Linear { slope, offset } => Ok(SurvivalOutcome::FiniteTime(time_at_factor(
            offset / slope,
            spec,
            lambda,
            env,
        )?)),
    }
}

/// Critical dephasing factor at which `m` becomes separable, if it does so
/// at finite time.
pub fn separability_factor(m: &BellMixture, env: EnvTopology) -> Result<Option<f64>> {
    Ok(match negativity_law(m, env)? {
        NegativityLaw::Linear { slope, offset } if offset > 0.0 => Some(offset / slope),
        _ => None,
    })
}

pub fn tes_lower_bound_beta(n0: f64, env: EnvTopology) -> Result<f64> {
    check_initial_negativity(n0, false)?;
    let a = env.bound_constant() as f64;
    Ok(((1.0 + n0) / (1.0 - n0)).ln() / (4.0 * a))
}

/// Lower bound on the survival time of any mixture with initial negativity
/// `n0 < 1`; attained on the faces of the Bell tetrahedron.
pub fn tes_lower_bound(n0: f64, env: EnvTopology, spec: ProcessSpec, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let b = tes_lower_bound_beta(n0, env)?;
    beta_inverse(spec, b / (lambda * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterRow {
    pub mixture: BellMixture,
    pub n0: f64,
    pub preserving: SurvivalOutcome,
    pub survival: SurvivalOutcome,
    pub tstar_bound: f64,
    /// `None` for `N0 = 1`, where the bound diverges.
    pub tes_bound: Option<f64>,
}

/// Timescales and bounds for one entangled mixture.
pub fn scatter_row(
    m: &BellMixture,
    spec: ProcessSpec,
    lambda: f64,
    env: EnvTopology,
    r: ThresholdRatio,
) -> Result<ScatterRow> {
    let n0 = m.initial_negativity();
    let tes_bound = if n0 < 1.0 {
        Some(tes_lower_bound(n0, env, spec, lambda)?)
    } else {
        None
    };
    Ok(ScatterRow {
        mixture: *m,
        n0,
        preserving: preserving_time(m, spec, lambda, r, env)?,
        survival: survival_time(m, spec, lambda, env)?,
        tstar_bound: tstar_lower_bound(n0, r, env, spec, lambda)?,
        tes_bound,
    })
}

/// Rows for `n_states` random entangled mixtures; state `i` is drawn from
/// `rng.fork(i)`, so the table does not depend on the worker count.
pub fn scatter_study(
    n_states: usize,
    spec: ProcessSpec,
    lambda: f64,
    env: EnvTopology,
    r: ThresholdRatio,
    rng: &SeededRng,
) -> Result<Vec<ScatterRow>> {
    if n_states == 0 {
        return Err(domain("n_states", 0.0, "[1, inf)"));
    }
    (0..n_states)
        .into_par_iter()
        .map(|i| {
            let m = sample_random_mixture(&mut rng.fork(i as u64), true);
            scatter_row(&m, spec, lambda, env, r)
        })
        .collect()
}
