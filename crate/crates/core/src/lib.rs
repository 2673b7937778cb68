//! Two-qubit dephasing under classical Gaussian noise.
//!
//! Two identical qubits are driven along `sigma_z` by zero-mean Gaussian
//! fields (Ornstein-Uhlenbeck, fractional, Wiener or white noise), either one
//! field per qubit or a single shared one. Starting from a mixture of Bell
//! states, the noise-averaged state depends on time only through the double
//! integral `beta(t)` of the noise covariance. This crate provides:
//!
//! - [`processes`]: kernels, `beta` and its inverse, exact path samplers;
//! - [`states`]: Bell mixtures, Bloch coordinates, density matrices, negativity;
//! - [`dynamics`]: analytic evolution and a Monte Carlo oracle for it;
//! - [`timescales`]: entanglement-preserving and survival times with bounds;
//! - [`cli`]: the CSV-emitting command line front end.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
mod error;
pub mod numerics;
pub mod processes;
pub mod states;
pub mod timescales;

pub use dynamics::{EnvTopology, EvolutionParams};
pub use error::{Error, Result};
pub use processes::{ProcessSpec, SeededRng, TimeGrid};
pub use states::{BellMixture, BlochDiagonal, TwoQubitDensity};
pub use timescales::{SurvivalOutcome, ThresholdRatio};
