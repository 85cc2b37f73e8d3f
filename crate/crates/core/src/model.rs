//! Continuous problem data: market constants, the solution box, payoffs and
//! the directional coefficients of the split operator.
//!
//! The pricing equation is posed in time-to-expiry, so `t = 0` carries the
//! payoff and the solver marches forward to `t = T`:
//!
//! ```text
//! u_t - ½[x²y u_xx + 2ρξ x y^{3/2} u_xy + ξ²y² u_yy] - r x u_x - μ y u_y + (r+β) u = g
//! ```
//!
//! Written in flux form the operator splits into an x part
//! `-(x (ā x u_x + b̄ u))_x + c₁ u` and a y part
//! `-(y (â y u_y + b̂ u))_y + c₂ u - (k u_x)_y` with `k = ρξ x y^{3/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::fitting_exponent;

/// Market constants of the stochastic volatility model.
///
/// `beta` is the exponential shift `ũ = e^{βt} u`; it only adds a positive
/// reaction term and defaults to zero for pricing runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub r: f64,
    pub xi: f64,
    pub mu: f64,
    pub rho: f64,
    #[serde(default)]
    pub beta: f64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if !(self.xi > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be nonnegative, got {}",
                self.beta
            )));
        }
        if !self.r.is_finite() || !self.mu.is_finite() {
            return Err(Error::InvalidParameter("r and mu must be finite".into()));
        }
        Ok(())
    }

    /// Reaction coefficient `c(y)` of the full divergence form, including `β`.
    pub fn divergence_reaction(&self, y: f64) -> f64 {
        let s = 0.75 * self.rho * y.sqrt() * self.xi;
        self.beta + 2.0 * self.r - s - y + self.mu - s - self.xi * self.xi
    }
}

/// The solution box `[0, X] x [ζ, Y] x [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub x_max: f64,
    pub y_max: f64,
    pub t_max: f64,
    #[serde(default)]
    pub zeta: f64,
}

impl DomainBox {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "X must be positive, got {}",
                self.x_max
            )));
        }
        if !(self.zeta >= 0.0 && self.zeta < self.y_max) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= zeta < Y, got zeta = {}, Y = {}",
                self.zeta, self.y_max
            )));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "T must be positive, got {}",
                self.t_max
            )));
        }
        Ok(())
    }
}

/// Terminal condition `u_T(x)`; independent of the variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payoff {
    /// `max(0, x - E)`.
    Ramp { strike: f64 },
    /// `B·H(x - E)`. `at_strike` is the value of `H(0)`.
    CashOrNothing {
        cash: f64,
        strike: f64,
        #[serde(default)]
        at_strike: f64,
    },
    /// `max(0, x - E₁) - max(0, x - E₂)` with `E₁ < E₂`.
    BullishSpread { lower: f64, upper: f64 },
    /// `1` on `(X₁, X₂)`, `-1` on `(X₂, X₃)`, `0` elsewhere.
    Butterfly { x1: f64, x2: f64, x3: f64 },
    /// Piecewise-linear interpolation of sampled values, constant outside.
    TableLookup { nodes: Vec<f64>, values: Vec<f64> },
}

impl Payoff {
    pub fn validate(&self, x_max: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Payoff::Ramp { strike } => {
                if !(*strike < x_max) {
                    return bad(format!("strike {strike} must be below X = {x_max}"));
                }
            }
            Payoff::CashOrNothing { cash, strike, .. } => {
                if !(*cash > 0.0) {
                    return bad(format!("cash amount must be positive, got {cash}"));
                }
                if !(*strike < x_max) {
                    return bad(format!("strike {strike} must be below X = {x_max}"));
                }
            }
            Payoff::BullishSpread { lower, upper } => {
                if !(lower < upper) {
                    return bad(format!("spread strikes must satisfy {lower} < {upper}"));
                }
            }
            Payoff::Butterfly { x1, x2, x3 } => {
                if !(x1 < x2 && x2 < x3 && *x3 <= x_max) {
                    return bad(format!(
                        "butterfly needs X1 < X2 < X3 <= X, got {x1}, {x2}, {x3}"
                    ));
                }
            }
            Payoff::TableLookup { nodes, values } => {
                if nodes.len() != values.len() || nodes.is_empty() {
                    return bad("table payoff needs matching, nonempty nodes and values".into());
                }
                if nodes.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("table payoff nodes must be strictly increasing".into());
                }
            }
        }
        Ok(())
    }

    /// Unchecked evaluation, defined for every real `x`.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Payoff::Ramp { strike } => (x - strike).max(0.0),
            Payoff::CashOrNothing {
                cash,
                strike,
                at_strike,
            } => {
                let s = x - strike;
                if s > 0.0 {
                    *cash
                } else if s == 0.0 {
                    cash * at_strike
                } else {
                    0.0
                }
            }
            Payoff::BullishSpread { lower, upper } => (x - lower).max(0.0) - (x - upper).max(0.0),
            Payoff::Butterfly { x1, x2, x3 } => {
                if x > *x1 && x < *x2 {
                    1.0
                } else if x > *x2 && x < *x3 {
                    -1.0
                } else {
                    0.0
                }
            }
            Payoff::TableLookup { nodes, values } => table_interp(nodes, values, x),
        }
    }

    /// Left derivative of the payoff at `x`; used to extend it past `X`.
    pub fn slope_from_left(&self, x: f64) -> f64 {
        match self {
            Payoff::Ramp { strike } => {
                if x > *strike {
                    1.0
                } else {
                    0.0
                }
            }
            Payoff::BullishSpread { lower, upper } => {
                if x > *lower && x <= *upper {
                    1.0
                } else {
                    0.0
                }
            }
            Payoff::CashOrNothing { .. } | Payoff::Butterfly { .. } => 0.0,
            Payoff::TableLookup { nodes, values } => {
                let n = nodes.len();
                if n < 2 || x <= nodes[0] || x > nodes[n - 1] {
                    return 0.0;
                }
                let k = nodes.partition_point(|&v| v < x).clamp(1, n - 1);
                (values[k] - values[k - 1]) / (nodes[k] - nodes[k - 1])
            }
        }
    }
}

fn table_interp(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    if x <= nodes[0] {
        return values[0];
    }
    if x >= nodes[n - 1] {
        return values[n - 1];
    }
    let k = nodes.partition_point(|&v| v <= x).clamp(1, n - 1);
    let w = (x - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    values[k - 1] + w * (values[k] - values[k - 1])
}

/// Checked payoff evaluation on `[0, x_max]`.
pub fn evaluate_payoff(payoff: &Payoff, x: f64, x_max: f64) -> Result<f64> {
    if !(0.0..=x_max).contains(&x) {
        return Err(Error::Domain {
            what: "asset price",
            value: x,
            lo: 0.0,
            hi: x_max,
        });
    }
    Ok(payoff.value(x))
}

/// Coefficients of the x-direction sub-problem on the line `y = const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XSweepCoeffs {
    pub a_bar: f64,
    pub b_bar: f64,
    pub c1: f64,
    pub alpha_bar: f64,
    /// `ā` vanished and `alpha_bar` holds the large fallback exponent.
    pub degenerate: bool,
}

pub fn xsweep_coefficients(params: &MarketParams, y: f64) -> XSweepCoeffs {
    let y = y.max(0.0);
    let corr = 1.5 * params.rho * params.xi * y.sqrt();
    let a_bar = 0.5 * y;
    let b_bar = params.r - y - corr;
    let c1 = 1.5 * params.r - y - corr + 0.5 * params.beta;
    let (alpha_bar, degenerate) = fitting_exponent(a_bar, b_bar);
    XSweepCoeffs {
        a_bar,
        b_bar,
        c1,
        alpha_bar,
        degenerate,
    }
}

/// Coefficients of the y-direction sub-problem plus the mixed-term factor at
/// `(x, y_half)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YSweepCoeffs {
    pub a_hat: f64,
    pub b_hat: f64,
    pub c2: f64,
    pub alpha_hat: f64,
    pub k: f64,
}

pub fn ysweep_coefficients(params: &MarketParams, x: f64, y_half: f64) -> YSweepCoeffs {
    let xi2 = params.xi * params.xi;
    let a_hat = 0.5 * xi2;
    let b_hat = params.mu - xi2;
    let c2 = 0.5 * params.r + params.mu - xi2 + 0.5 * params.beta;
    let (alpha_hat, _) = fitting_exponent(a_hat, b_hat);
    YSweepCoeffs {
        a_hat,
        b_hat,
        c2,
        alpha_hat,
        k: mixed_coefficient(params, x, y_half),
    }
}

/// `k(x, y) = ρξ x y^{3/2}`.
#[inline]
pub fn mixed_coefficient(params: &MarketParams, x: f64, y: f64) -> f64 {
    let y = y.max(0.0);
    params.rho * params.xi * x * y * y.sqrt()
}

/// Splits a source `g` into the parts fed to the x and y sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSplit {
    pub weight_x: f64,
}

impl Default for SourceSplit {
    fn default() -> Self {
        Self { weight_x: 0.5 }
    }
}

impl SourceSplit {
    pub fn new(weight_x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight_x) {
            return Err(Error::InvalidParameter(format!(
                "source split weight must lie in [0, 1], got {weight_x}"
            )));
        }
        Ok(Self { weight_x })
    }

    #[inline]
    pub fn g1(&self, g: f64) -> f64 {
        self.weight_x * g
    }

    #[inline]
    pub fn g2(&self, g: f64) -> f64 {
        (1.0 - self.weight_x) * g
    }
}

/// Exact value and source term of the manufactured solution `u = x e^{-yt}`.
pub fn manufactured_case(params: &MarketParams, x: f64, y: f64, t: f64) -> (f64, f64) {
    let u = x * (-y * t).exp();
    let bracket = -y + params.rho * params.xi * y * y.max(0.0).sqrt() * t
        - 0.5 * params.xi * params.xi * y * y * t * t
        + params.mu * y * t
        + params.beta;
    (u, u * bracket)
}

/// Price on `y = 0`, where the asset grows deterministically:
/// `e^{-rt} u_T(x e^{rt})`. Arguments beyond `x_max` extend the payoff
/// linearly with its slope at `x_max`.
pub fn natural_boundary_y0(payoff: &Payoff, r: f64, x: f64, t: f64, x_max: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "asset price",
            value: x,
            lo: 0.0,
            hi: x_max,
        });
    }
    let growth = (r * t).exp();
    let arg = x * growth;
    let terminal = if arg <= x_max {
        payoff.value(arg)
    } else {
        payoff.value(x_max) + payoff.slope_from_left(x_max) * (arg - x_max)
    };
    Ok(terminal / growth)
}
