//! Preset problems: three pricing cases and the manufactured solution.

use std::sync::Arc;

use crate::lod::{BoundaryKind, Problem};
use crate::model::{manufactured_case, DomainBox, MarketParams, Payoff};

/// Coefficients shared by the pricing cases.
pub fn pricing_params() -> MarketParams {
    MarketParams {
        r: 0.1,
        xi: 1.0,
        mu: 0.0,
        rho: 0.9,
        beta: 0.0,
    }
}

/// Vanilla call, `E = 57`.
pub fn tp1() -> Problem {
    tp1_with_zeta(0.01)
}

/// Vanilla call on a box whose lower variance edge is `zeta`; `zeta = 0`
/// switches the bottom edge to the deterministic-growth price.
pub fn tp1_with_zeta(zeta: f64) -> Problem {
    Problem {
        params: pricing_params(),
        domain: DomainBox {
            x_max: 100.0,
            y_max: 1.0,
            t_max: 1.0,
            zeta,
        },
        payoff: Payoff::Ramp { strike: 57.0 },
        boundary: BoundaryKind::Pricing,
        source: None,
    }
}

/// Cash-or-nothing call paying `cash` above `E = 57`.
pub fn tp2(cash: f64) -> Problem {
    Problem {
        params: pricing_params(),
        domain: DomainBox {
            x_max: 100.0,
            y_max: 0.36,
            t_max: 1.0,
            zeta: 0.01,
        },
        payoff: Payoff::CashOrNothing {
            cash,
            strike: 57.0,
            at_strike: 0.0,
        },
        boundary: BoundaryKind::Pricing,
        source: None,
    }
}

/// Butterfly on 40/50/60 with zero edges.
pub fn tp3() -> Problem {
    Problem {
        params: pricing_params(),
        domain: DomainBox {
            x_max: 100.0,
            y_max: 0.36,
            t_max: 1.0,
            zeta: 0.01,
        },
        payoff: Payoff::Butterfly {
            x1: 40.0,
            x2: 50.0,
            x3: 60.0,
        },
        boundary: BoundaryKind::Homogeneous,
        source: None,
    }
}

/// `u = x e^{-yt}` with the matching source, on `[0, X] × [ζ, Y] × (0, T]`.
pub fn manufactured(params: MarketParams, domain: DomainBox) -> Problem {
    let exact = Arc::new(move |x: f64, y: f64, t: f64| manufactured_case(&params, x, y, t).0);
    let source = Arc::new(move |x: f64, y: f64, t: f64| manufactured_case(&params, x, y, t).1);
    Problem {
        params,
        domain,
        // u(x, y, 0) = x
        payoff: Payoff::Ramp { strike: 0.0 },
        boundary: BoundaryKind::Exact(exact),
        source: Some(source),
    }
}

/// Unit box with `ζ = 0.01`.
pub fn manufactured_unit_box() -> DomainBox {
    DomainBox {
        x_max: 1.0,
        y_max: 1.0,
        t_max: 1.0,
        zeta: 0.01,
    }
}

/// Exact solution of [`manufactured`].
pub fn manufactured_exact(params: MarketParams, x: f64, y: f64, t: f64) -> f64 {
    manufactured_case(&params, x, y, t).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in [
            tp1(),
            tp1_with_zeta(0.0),
            tp2(1.0),
            tp3(),
            manufactured(pricing_params(), manufactured_unit_box()),
        ] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn manufactured_initial_data_is_identity() {
        let p = manufactured(pricing_params(), manufactured_unit_box());
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(p.payoff.value(x), x);
            assert_eq!(manufactured_exact(p.params, x, 0.4, 0.0), x);
        }
    }
}
