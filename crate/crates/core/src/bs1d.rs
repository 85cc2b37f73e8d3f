//! One-dimensional fitted finite-volume Black–Scholes solver and the
//! Dirichlet data it generates for the two-dimensional problem.
//!
//! In time-to-expiry the 1D equation `u_t = ½σ²x²u_xx + r x u_x - r u` has the
//! flux form `u_t = (x(a x u_x + b u))_x - c u` with
//!
//! ```text
//! a = ½σ²,   b = r - σ²,   c = 2r - σ²
//! ```
//!
//! since `(x(a x u_x + b u))_x = a x² u_xx + (2a + b) x u_x + b u`, which needs
//! `2a + b = r` and `b - c = -r`.

use rayon::join;

use crate::error::{Error, Result};
use crate::line::{fitted_line_matrix, LineCoeffs};
use crate::mesh::{Axis, Grid2D};
use crate::model::{natural_boundary_y0, DomainBox, MarketParams, Payoff};
use crate::tridiag::{check_m_matrix, MMatrixReport, ThomasFactorization};

/// Dirichlet value used at `x = X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RightBoundary {
    /// The payoff at `X`, constant in time.
    #[default]
    Payoff,
    /// `e^{-rt} u_T(X e^{rt})` with the payoff extended linearly past `X`.
    Discounted,
}

#[derive(Debug, Clone)]
pub struct Bs1dProblem {
    pub sigma: f64,
    pub r: f64,
    pub payoff: Payoff,
    pub axis: Axis,
    pub steps: usize,
    pub t_max: f64,
    pub right: RightBoundary,
}

#[derive(Debug, Clone)]
pub struct Bs1dSolution {
    pub times: Vec<f64>,
    /// `profiles[k][i]` is the value at node `i` and time `t_k`.
    pub profiles: Vec<Vec<f64>>,
    pub m_matrix: MMatrixReport,
}

impl Bs1dProblem {
    pub fn coeffs(&self) -> LineCoeffs {
        let s2 = self.sigma * self.sigma;
        LineCoeffs {
            a: 0.5 * s2,
            b: self.r - s2,
            c: 2.0 * self.r - s2,
        }
    }

    fn right_value(&self, t: f64) -> Result<f64> {
        let x_max = self.axis.hi();
        match self.right {
            RightBoundary::Payoff => Ok(self.payoff.value(x_max)),
            RightBoundary::Discounted => natural_boundary_y0(&self.payoff, self.r, x_max, t, x_max),
        }
    }
}

pub fn solve_bs1d(problem: &Bs1dProblem) -> Result<Bs1dSolution> {
    if !(problem.sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be nonnegative, got {}",
            problem.sigma
        )));
    }
    if problem.steps == 0 {
        return Err(Error::InvalidParameter(
            "the 1D solver needs at least one time step".into(),
        ));
    }
    if !(problem.t_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "T must be positive, got {}",
            problem.t_max
        )));
    }
    let axis = &problem.axis;
    let n = axis.intervals();
    let tau = problem.t_max / problem.steps as f64;
    let sys = fitted_line_matrix(axis, problem.coeffs(), tau)?;
    let m_matrix = check_m_matrix(&sys);
    let factor = ThomasFactorization::new(&sys.lower, &sys.diag, &sys.upper)?;

    let dual = axis.dual_widths();
    let left = problem.payoff.value(axis.lo());
    let times: Vec<f64> = (0..=problem.steps).map(|k| k as f64 * tau).collect();
    let mut profiles = Vec::with_capacity(problem.steps + 1);
    let initial: Vec<f64> = axis
        .nodes()
        .iter()
        .map(|&x| problem.payoff.value(x))
        .collect();
    profiles.push(initial);
    for k in 1..=problem.steps {
        let prev = &profiles[k - 1];
        let mut next: Vec<f64> = (0..=n).map(|i| dual[i] / tau * prev[i]).collect();
        next[0] = left;
        next[n] = problem.right_value(times[k])?;
        factor.solve_in_place(&mut next);
        profiles.push(next);
    }
    Ok(Bs1dSolution {
        times,
        profiles,
        m_matrix,
    })
}

/// Dirichlet data on the four edges at every time level `t_k`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfiles {
    pub times: Vec<f64>,
    /// `u_D(0, y_j, t_k)` as `left[k][j]`.
    pub left: Vec<Vec<f64>>,
    /// `u_D(X, y_j, t_k)`.
    pub right: Vec<Vec<f64>>,
    /// `u_D(x_i, ζ, t_k)` as `bottom[k][i]`.
    pub bottom: Vec<Vec<f64>>,
    /// `u_D(x_i, Y, t_k)`.
    pub top: Vec<Vec<f64>>,
}

impl BoundaryProfiles {
    pub fn levels(&self) -> usize {
        self.times.len()
    }

    pub fn homogeneous(grid: &Grid2D, times: Vec<f64>) -> Self {
        let l = times.len();
        Self {
            left: vec![vec![0.0; grid.ny()]; l],
            right: vec![vec![0.0; grid.ny()]; l],
            bottom: vec![vec![0.0; grid.nx()]; l],
            top: vec![vec![0.0; grid.nx()]; l],
            times,
        }
    }

    /// Samples `f(x, y, t)` on the edges.
    pub fn from_fn<F: Fn(f64, f64, f64) -> f64>(grid: &Grid2D, times: Vec<f64>, f: F) -> Self {
        let (x0, x1) = (grid.x.lo(), grid.x.hi());
        let (y0, y1) = (grid.y.lo(), grid.y.hi());
        let xs = grid.x.nodes();
        let ys = grid.y.nodes();
        let col = |x: f64, t: f64| ys.iter().map(|&y| f(x, y, t)).collect::<Vec<_>>();
        let row = |y: f64, t: f64| xs.iter().map(|&x| f(x, y, t)).collect::<Vec<_>>();
        Self {
            left: times.iter().map(|&t| col(x0, t)).collect(),
            right: times.iter().map(|&t| col(x1, t)).collect(),
            bottom: times.iter().map(|&t| row(y0, t)).collect(),
            top: times.iter().map(|&t| row(y1, t)).collect(),
            times,
        }
    }

    /// CSV with columns `edge,k,t,index,coordinate,value`.
    pub fn to_csv(&self, grid: &Grid2D) -> String {
        use crate::csvfmt::num;
        let mut out = String::from("edge,k,t,index,coordinate,value\n");
        let edges = [
            ("bottom", &self.bottom, grid.x.nodes()),
            ("top", &self.top, grid.x.nodes()),
            ("left", &self.left, grid.y.nodes()),
            ("right", &self.right, grid.y.nodes()),
        ];
        for (name, data, coords) in edges {
            for (k, level) in data.iter().enumerate() {
                for (i, v) in level.iter().enumerate() {
                    out.push_str(&format!(
                        "{name},{k},{},{i},{},{}\n",
                        num(self.times[k]),
                        num(coords[i]),
                        num(*v)
                    ));
                }
            }
        }
        out
    }
}

/// Edge data for the pricing problems.
///
/// The x-edges extend the payoff. For `ζ > 0` the y-edges are 1D solves with
/// `σ = √ζ` and `σ = √Y` on the same x-axis and time grid. For `ζ = 0` the
/// bottom edge is the deterministic-growth price, and the `x = X` edge (also in
/// the top-edge solve) is discounted so the corners agree.
pub fn make_boundary_profiles(
    params: &MarketParams,
    domain: &DomainBox,
    payoff: &Payoff,
    grid: &Grid2D,
    steps: usize,
) -> Result<BoundaryProfiles> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "boundary profiles need at least one time step".into(),
        ));
    }
    let x_axis = &grid.x;
    let tau = domain.t_max / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * tau).collect();
    let ny = grid.ny();
    let x_max = x_axis.hi();
    let natural = domain.zeta == 0.0;
    let right_kind = if natural {
        RightBoundary::Discounted
    } else {
        RightBoundary::Payoff
    };
    let edge_problem = |sigma: f64| Bs1dProblem {
        sigma,
        r: params.r,
        payoff: payoff.clone(),
        axis: x_axis.clone(),
        steps,
        t_max: domain.t_max,
        right: right_kind,
    };

    let (bottom, top) = if natural {
        let bottom = times
            .iter()
            .map(|&t| {
                x_axis
                    .nodes()
                    .iter()
                    .map(|&x| natural_boundary_y0(payoff, params.r, x, t, x_max))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let top = solve_bs1d(&edge_problem(domain.y_max.sqrt()))?.profiles;
        (bottom, top)
    } else {
        let (lo, hi) = join(
            || solve_bs1d(&edge_problem(domain.zeta.sqrt())),
            || solve_bs1d(&edge_problem(domain.y_max.sqrt())),
        );
        (lo?.profiles, hi?.profiles)
    };

    let left_value = payoff.value(0.0);
    let left = times.iter().map(|_| vec![left_value; ny]).collect();
    let right = times
        .iter()
        .map(|&t| {
            let v = match right_kind {
                RightBoundary::Payoff => payoff.value(x_max),
                RightBoundary::Discounted => {
                    natural_boundary_y0(payoff, params.r, x_max, t, x_max)?
                }
            };
            Ok(vec![v; ny])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryProfiles {
        times,
        left,
        right,
        bottom,
        top,
    })
}
