//! Fitted two-point flux approximations.
//!
//! On an interval `[x_lo, x_hi]` the flux `w = a x v' + b v` of the local
//! problem `(a x v' + b v)' = 0` is constant and, with `α = b/a`,
//!
//! ```text
//! w = b (x_hi^α u_hi - x_lo^α u_lo) / (x_hi^α - x_lo^α)
//! ```
//!
//! Near the degenerate end `x = 0` an extra degree of freedom is added to the
//! local problem, giving `w = ½[(a + b) u₁ - (a - b) u₀]`.

/// Exponent used in place of `b/a` once `a` has vanished.
pub const ALPHA_MAX: f64 = 1e8;
/// Diffusion factors below this are treated as zero.
pub const EPS_A: f64 = 1e-14;
/// Below this `|α|` the logarithmic limit of the weights is used.
pub const ALPHA_MIN: f64 = 1e-7;

use crate::error::{Error, Result};

/// Flux approximated as `w_hi·u_hi + w_lo·u_lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWeights {
    pub w_lo: f64,
    pub w_hi: f64,
}

/// `α = b/a`, or `sign(b)·ALPHA_MAX` when `a < EPS_A`. The flag reports the
/// fallback.
pub fn fitting_exponent(a: f64, b: f64) -> (f64, bool) {
    if a < EPS_A {
        let alpha = if b > 0.0 {
            ALPHA_MAX
        } else if b < 0.0 {
            -ALPHA_MAX
        } else {
            0.0
        };
        (alpha, true)
    } else {
        (b / a, false)
    }
}

/// Fitted weights on `[x_lo, x_hi]` with `0 < x_lo < x_hi`.
pub fn interior_flux_weights(a: f64, b: f64, x_lo: f64, x_hi: f64) -> Result<FluxWeights> {
    if !(x_lo > 0.0 && x_hi > x_lo) {
        return Err(Error::FluxInterval { x_lo, x_hi });
    }
    let (alpha, _) = fitting_exponent(a, b);
    Ok(fitted_weights(a, b, alpha, (x_lo / x_hi).ln()))
}

/// Shared kernel for both sweep directions. `log_ratio = ln(x_lo/x_hi) < 0`.
///
/// With `L = α·log_ratio` the weights are `w_hi = -b/expm1(L)` and
/// `w_lo = -b/expm1(-L)`, which stays finite for the fallback exponent.
#[inline]
pub(crate) fn fitted_weights(a: f64, b: f64, alpha: f64, log_ratio: f64) -> FluxWeights {
    if alpha.abs() < ALPHA_MIN {
        let w = -a / log_ratio;
        return FluxWeights { w_lo: -w, w_hi: w };
    }
    let l = alpha * log_ratio;
    FluxWeights {
        w_hi: -b / l.exp_m1(),
        w_lo: -b / (-l).exp_m1(),
    }
}

/// Weights for the interval touching the degenerate end `x = 0`.
pub fn origin_flux_weights(a: f64, b: f64) -> FluxWeights {
    FluxWeights {
        w_hi: 0.5 * (a + b),
        w_lo: -0.5 * (a - b),
    }
}
