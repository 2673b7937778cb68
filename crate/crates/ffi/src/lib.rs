//! C ABI over the `dephasing` crate.
//!
//! A [`DphModel`] handle bundles the noise process, environment topology,
//! coupling and qubit frequency. Every entry point returns a [`DphStatus`]
//! and writes results through caller-provided out-pointers. Bell mixtures
//! are passed as four doubles `(c1, c2, c3, c4)`; density matrices come back
//! as two row-major arrays of 16 doubles (real and imaginary parts).

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dephasing::dynamics::{self, EnvTopology, EvolutionParams};
use dephasing::numerics::lambert_w0;
use dephasing::processes::{beta, ProcessSpec, SeededRng};
use dephasing::timescales::{self, SurvivalOutcome, ThresholdRatio};
use dephasing::{BellMixture, Error, TwoQubitDensity};

/// Result code of every call. `DPH_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DphStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NotEntangled = 4,
    NoConvergence = 5,
    Unsupported = 6,
    NotPositiveDefinite = 7,
    Panic = 8,
}

/// Value of the `env` argument of [`dph_model_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DphEnv {
    Independent = 0,
    Common = 1,
}

/// Kind of threshold crossing reported by the timescale calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DphOutcome {
    Finite = 0,
    Asymptotic = 1,
    Never = 2,
}

/// Opaque model handle.
pub struct DphModel {
    params: EvolutionParams,
}

impl From<Error> for DphStatus {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => Self::Domain,
            Error::NotBracketed { .. } | Error::NoConvergence(_) => Self::NoConvergence,
            Error::Unsupported(_) => Self::Unsupported,
            Error::NotPositiveDefinite(_) => Self::NotPositiveDefinite,
            Error::InvalidMixture(_) | Error::InvalidDensity(_) => Self::InvalidArgument,
            Error::NotEntangled(_) => Self::NotEntangled,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), DphStatus>) -> DphStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DphStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => DphStatus::Panic,
    }
}

unsafe fn model_ref<'a>(model: *const DphModel) -> Result<&'a DphModel, DphStatus> {
    model.as_ref().ok_or(DphStatus::NullPointer)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), DphStatus> {
    if out.is_null() {
        return Err(DphStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

unsafe fn read_mixture(c: *const f64) -> Result<BellMixture, DphStatus> {
    if c.is_null() {
        return Err(DphStatus::NullPointer);
    }
    let w = std::slice::from_raw_parts(c, 4);
    Ok(BellMixture::new([w[0], w[1], w[2], w[3]])?)
}

unsafe fn write_density(
    rho: &TwoQubitDensity,
    out_re: *mut f64,
    out_im: *mut f64,
) -> Result<(), DphStatus> {
    if out_re.is_null() || out_im.is_null() {
        return Err(DphStatus::NullPointer);
    }
    let re = std::slice::from_raw_parts_mut(out_re, 16);
    let im = std::slice::from_raw_parts_mut(out_im, 16);
    for i in 0..4 {
        for j in 0..4 {
            let z = rho.get(i, j);
            re[4 * i + j] = z.re;
            im[4 * i + j] = z.im;
        }
    }
    Ok(())
}

unsafe fn write_outcome(
    outcome: SurvivalOutcome,
    out_t: *mut f64,
    out_kind: *mut DphOutcome,
) -> Result<(), DphStatus> {
    let kind = match outcome {
        SurvivalOutcome::FiniteTime(_) => DphOutcome::Finite,
        SurvivalOutcome::Asymptotic => DphOutcome::Asymptotic,
        SurvivalOutcome::Never => DphOutcome::Never,
    };
    write(out_t, outcome.time_or_inf())?;
    write(out_kind, kind)
}

/// Creates a model. `process` uses the `ou:gamma=G`, `fgn:h=H`, `wiener`,
/// `white` grammar; `env` is a [`DphEnv`] value.
///
/// # Safety
/// `process` must be a NUL-terminated string and `out` a valid pointer. The
/// handle written to `out` must be released with [`dph_model_free`].
#[no_mangle]
pub unsafe extern "C" fn dph_model_new(
    process: *const c_char,
    env: u32,
    lambda: f64,
    omega0: f64,
    out: *mut *mut DphModel,
) -> DphStatus {
    guard(|| {
        if process.is_null() || out.is_null() {
            return Err(DphStatus::NullPointer);
        }
        let text = CStr::from_ptr(process)
            .to_str()
            .map_err(|_| DphStatus::InvalidArgument)?;
        let spec: ProcessSpec = text.parse().map_err(|_| DphStatus::InvalidArgument)?;
        let env = match env {
            0 => EnvTopology::Independent,
            1 => EnvTopology::Common,
            _ => return Err(DphStatus::InvalidArgument),
        };
        let params = EvolutionParams::new(spec, env, lambda, omega0)?;
        out.write(Box::into_raw(Box::new(DphModel { params })));
        Ok(())
    })
}

/// Releases a model. Passing NULL is a no-op.
///
/// # Safety
/// `model` must come from [`dph_model_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dph_model_free(model: *mut DphModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Static description of a status code. Never NULL.
#[no_mangle]
pub extern "C" fn dph_status_message(status: DphStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        DphStatus::Ok => c"ok",
        DphStatus::NullPointer => c"null pointer argument",
        DphStatus::InvalidArgument => c"invalid argument",
        DphStatus::Domain => c"argument outside its mathematical domain",
        DphStatus::NotEntangled => c"initial state is not entangled",
        DphStatus::NoConvergence => c"root finding did not converge",
        DphStatus::Unsupported => c"operation not supported for white noise",
        DphStatus::NotPositiveDefinite => c"covariance matrix is not positive definite",
        DphStatus::Panic => c"internal panic",
    };
    msg.as_ptr()
}

/// Principal branch of the Lambert W function.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dph_lambert_w0(z: f64, out: *mut f64) -> DphStatus {
    guard(|| write(out, lambert_w0(z)?))
}

/// Dephasing integral `beta(t)` of the model's process.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dph_beta(model: *const DphModel, t: f64, out: *mut f64) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, beta(m.params.spec(), t)?)
    })
}

/// Coherence damping factor at time `t`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dph_dephasing_factor(
    model: *const DphModel,
    t: f64,
    out: *mut f64,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, dynamics::dephasing_factor(&m.params, t)?)
    })
}

/// Negativity of mixture `c` at time `t`.
///
/// # Safety
/// `model` and `out` must be valid; `c` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn dph_negativity_at(
    model: *const DphModel,
    c: *const f64,
    t: f64,
    out: *mut f64,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        let mix = read_mixture(c)?;
        write(out, dynamics::negativity_at(&mix, &m.params, t)?)
    })
}

/// Noise-averaged density matrix of mixture `c` at time `t`.
///
/// # Safety
/// `model` must be valid; `c` must point to 4 doubles; `out_re` and
/// `out_im` must each point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dph_evolve(
    model: *const DphModel,
    c: *const f64,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        let mix = read_mixture(c)?;
        write_density(&dynamics::evolve(&mix, &m.params, t)?, out_re, out_im)
    })
}

/// Monte Carlo estimate of the state at time `t` from `samples` noise
/// realizations. The result depends only on the arguments, not on threading.
///
/// # Safety
/// As for [`dph_evolve`].
#[no_mangle]
pub unsafe extern "C" fn dph_mc_evolve(
    model: *const DphModel,
    c: *const f64,
    t: f64,
    samples: usize,
    grid_density: usize,
    seed: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        let mix = read_mixture(c)?;
        let rho = dynamics::mc_evolve(
            &mix,
            &m.params,
            t,
            samples,
            grid_density,
            &SeededRng::new(seed),
        )?;
        write_density(&rho, out_re, out_im)
    })
}

/// Entanglement-preserving time for threshold ratio `r`. `out_t` receives
/// infinity when the outcome is not finite.
///
/// # Safety
/// `model`, `out_t` and `out_kind` must be valid; `c` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn dph_preserving_time(
    model: *const DphModel,
    c: *const f64,
    r: f64,
    out_t: *mut f64,
    out_kind: *mut DphOutcome,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        let mix = read_mixture(c)?;
        let p = &m.params;
        let outcome = timescales::preserving_time(
            &mix,
            p.spec(),
            p.lambda(),
            ThresholdRatio::new(r)?,
            p.env(),
        )?;
        write_outcome(outcome, out_t, out_kind)
    })
}

/// Entanglement-survival time. `out_t` receives infinity when the outcome
/// is not finite.
///
/// # Safety
/// As for [`dph_preserving_time`].
#[no_mangle]
pub unsafe extern "C" fn dph_survival_time(
    model: *const DphModel,
    c: *const f64,
    out_t: *mut f64,
    out_kind: *mut DphOutcome,
) -> DphStatus {
    guard(|| {
        let m = model_ref(model)?;
        let mix = read_mixture(c)?;
        let p = &m.params;
        let outcome = timescales::survival_time(&mix, p.spec(), p.lambda(), p.env())?;
        write_outcome(outcome, out_t, out_kind)
    })
}

/// Lower bound on the preserving time for initial negativity `n0`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dph_tstar_lower_bound(
    model: *const DphModel,
    n0: f64,
    r: f64,
    out: *mut f64,
) -> DphStatus {
    guard(|| {
        let p = &model_ref(model)?.params;
        let t = timescales::tstar_lower_bound(
            n0,
            ThresholdRatio::new(r)?,
            p.env(),
            p.spec(),
            p.lambda(),
        )?;
        write(out, t)
    })
}

/// Lower bound on the survival time for initial negativity `n0 < 1`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dph_tes_lower_bound(
    model: *const DphModel,
    n0: f64,
    out: *mut f64,
) -> DphStatus {
    guard(|| {
        let p = &model_ref(model)?.params;
        write(
            out,
            timescales::tes_lower_bound(n0, p.env(), p.spec(), p.lambda())?,
        )
    })
}
