//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hwlod::bs1d::{solve_bs1d, Bs1dProblem, RightBoundary};
use hwlod::mesh::{build_axis, AxisSpec};
use hwlod::model::{manufactured_case, MarketParams, Payoff};
use hwlod::tridiag::TridiagonalSystem;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Gaussian elimination with partial pivoting on the dense matrix.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(sys: &TridiagonalSystem) -> Vec<f64> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        a[i][i] = sys.diag[i];
        if i > 0 {
            a[i][i - 1] = sys.lower[i];
        }
        if i + 1 < n {
            a[i][i + 1] = sys.upper[i];
        }
        a[i][n] = sys.rhs[i];
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][n] - s) / a[i][i];
    }
    x
}

/// Random strictly diagonally dominant tridiagonal system of size `n`.
pub fn random_dominant_system<R: Rng>(rng: &mut R, n: usize) -> TridiagonalSystem {
    let mut sys = TridiagonalSystem::zeros(n);
    for i in 0..n {
        let lo = if i > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
        let up = if i + 1 < n {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        };
        let margin = rng.gen_range(0.1..2.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        sys.lower[i] = lo;
        sys.upper[i] = up;
        sys.diag[i] = sign * (f64::abs(lo) + f64::abs(up) + margin);
        sys.rhs[i] = rng.gen_range(-10.0..10.0);
    }
    sys
}

/// Closed-form European call.
pub fn bs_call(s: f64, strike: f64, r: f64, sigma: f64, t: f64) -> f64 {
    if t <= 0.0 || sigma <= 0.0 {
        return (s - strike * (-r * t).exp()).max(0.0);
    }
    if s <= 0.0 {
        return 0.0;
    }
    let n = Normal::new(0.0, 1.0).unwrap();
    let sq = sigma * t.sqrt();
    let d1 = ((s / strike).ln() + (r + 0.5 * sigma * sigma) * t) / sq;
    let d2 = d1 - sq;
    s * n.cdf(d1) - strike * (-r * t).exp() * n.cdf(d2)
}

/// Largest relative error of the 1D solver against [`bs_call`] on
/// `[0.5E, 1.5E]`, with `X = 4E` and a discounted far edge.
pub fn bs1d_call_error(cells: usize, steps: usize) -> f64 {
    let (strike, r, sigma, t) = (57.0, 0.1, 0.4, 1.0);
    let axis = build_axis(&AxisSpec::Uniform { n: cells }, 0.0, 4.0 * strike).unwrap();
    let problem = Bs1dProblem {
        sigma,
        r,
        payoff: Payoff::Ramp { strike },
        axis: axis.clone(),
        steps,
        t_max: t,
        right: RightBoundary::Discounted,
    };
    let sol = solve_bs1d(&problem).unwrap();
    let last = sol.profiles.last().unwrap();
    axis.nodes()
        .iter()
        .zip(last)
        .filter(|(&x, _)| (0.5 * strike..=1.5 * strike).contains(&x))
        .map(|(&x, &v)| {
            let exact = bs_call(x, strike, r, sigma, t);
            (v - exact).abs() / exact
        })
        .fold(0.0, f64::max)
}

/// `Lu - g` for the manufactured pair, with `L` applied by central differences
/// of step `h` in `x`, `y` and `t`.
pub fn manufactured_residual(p: &MarketParams, x: f64, y: f64, t: f64, h: f64) -> f64 {
    let u = |x: f64, y: f64, t: f64| manufactured_case(p, x, y, t).0;
    let u0 = u(x, y, t);
    let ut = (u(x, y, t + h) - u(x, y, t - h)) / (2.0 * h);
    let ux = (u(x + h, y, t) - u(x - h, y, t)) / (2.0 * h);
    let uy = (u(x, y + h, t) - u(x, y - h, t)) / (2.0 * h);
    let uxx = (u(x + h, y, t) - 2.0 * u0 + u(x - h, y, t)) / (h * h);
    let uyy = (u(x, y + h, t) - 2.0 * u0 + u(x, y - h, t)) / (h * h);
    let uxy = (u(x + h, y + h, t) - u(x + h, y - h, t) - u(x - h, y + h, t) + u(x - h, y - h, t))
        / (4.0 * h * h);
    let lu = ut
        - 0.5
            * (x * x * y * uxx
                + 2.0 * p.rho * p.xi * x * y.powf(1.5) * uxy
                + p.xi * p.xi * y * y * uyy)
        - p.r * x * ux
        - p.mu * y * uy
        + (p.r + p.beta) * u0;
    lu - manufactured_case(p, x, y, t).1
}
