//! Implicit-Euler matrix of one fitted finite-volume line.
//!
//! Integrating `(u - u_prev)/τ = (s·w)_s - c u + f` over the control volume
//! `[s_{i-1/2}, s_{i+1/2}]` gives, for each interior node,
//!
//! ```text
//! ħ_i (u_i - u_prev_i)/τ = s_{i+1/2} w_{i+1/2} - s_{i-1/2} w_{i-1/2} - ħ_i c u_i + ħ_i f_i
//! ```
//!
//! with the fitted two-point fluxes from [`crate::flux`]. Both end rows are
//! identity rows for boundary data.

use crate::error::Result;
use crate::flux::{fitted_weights, fitting_exponent, origin_flux_weights, FluxWeights};
use crate::mesh::Axis;
use crate::tridiag::TridiagonalSystem;

/// Constant coefficients of `w = a s u_s + b u` and the reaction `c` along a
/// line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Flux weights on every interval of `axis`; an interval starting at zero
/// uses the degenerate origin weights.
pub fn interval_weights(axis: &Axis, a: f64, b: f64) -> Vec<FluxWeights> {
    let (alpha, _) = fitting_exponent(a, b);
    let nodes = axis.nodes();
    nodes
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                origin_flux_weights(a, b)
            } else {
                fitted_weights(a, b, alpha, (w[0] / w[1]).ln())
            }
        })
        .collect()
}

/// Matrix of `(I + τL)` scaled by the dual widths; `rhs` is left at zero and
/// rows `0`, `N` are Dirichlet rows.
pub fn fitted_line_matrix(axis: &Axis, coeffs: LineCoeffs, tau: f64) -> Result<TridiagonalSystem> {
    let n = axis.intervals();
    let weights = interval_weights(axis, coeffs.a, coeffs.b);
    let dual = axis.dual_widths();
    let mut sys = TridiagonalSystem::zeros(n + 1);
    for i in 1..n {
        let left = weights[i - 1];
        let right = weights[i];
        let below = axis.face_below(i);
        let above = axis.face_above(i);
        sys.lower[i] = below * left.w_lo;
        sys.upper[i] = -above * right.w_hi;
        sys.diag[i] = dual[i] / tau + dual[i] * coeffs.c - above * right.w_lo + below * left.w_hi;
    }
    sys.set_dirichlet(0, 0.0);
    sys.set_dirichlet(n, 0.0);
    Ok(sys)
}
