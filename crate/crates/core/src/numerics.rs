//! Special functions and scalar root finding.

use std::f64::consts::E;

use crate::error::{domain, Error, Result};

/// Stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(domain("abs_tol", abs_tol, "(0, inf)"));
        }
        if max_iter == 0 {
            return Err(domain("max_iter", 0.0, "[1, inf)"));
        }
        Ok(Self { abs_tol, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// `|e*z + 1|` below this is rounding noise around the branch point `z = -1/e`.
const BRANCH_SLACK: f64 = 8.0 * f64::EPSILON;

/// Principal branch `W0` of the Lambert function, the solution `w >= -1` of
/// `w * exp(w) = z` for `z >= -1/e`.
///
/// The starting point is the branch-point series in `p = sqrt(2(ez + 1))` near
/// `-1/e`, Winitzki's logarithmic approximation in the middle range, and the
/// asymptotic `ln z - ln ln z` expansion for large arguments. Halley iteration
/// then polishes it to machine precision.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(domain("z", z, "[-1/e, inf)"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let q = E.mul_add(z, 1.0);
    if q.abs() <= BRANCH_SLACK {
        return Ok(-1.0);
    }
    if q < 0.0 {
        return Err(domain("z", z, "[-1/e, inf)"));
    }

    let mut w = if q < 0.3 {
        let p = (2.0 * q).sqrt();
        let series = -1.0
            + p * (1.0
                + p * (-1.0 / 3.0
                    + p * (11.0 / 72.0
                        + p * (-43.0 / 540.0 + p * (769.0 / 17280.0 - p * 221.0 / 8505.0)))));
        // truncation error is O(p^7); iterating would only add rounding noise
        if p < 1e-3 {
            return Ok(series.max(-1.0));
        }
        series
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w.mul_add(ew, -z);
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w = (w - step).max(-1.0);
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Bisection root finder on a sign-changing bracket.
///
/// Returns the midpoint of the final bracket once its width drops to
/// `tol.abs_tol`, or earlier if an exact zero is hit or the bracket cannot be
/// split further in floating point.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }

    for _ in 0..tol.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= tol.abs_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol.abs_tol {
        Ok(lo + 0.5 * (hi - lo))
    } else {
        Err(Error::NoConvergence(tol.max_iter))
    }
}
