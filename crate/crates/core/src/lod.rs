//! Locally one-dimensional stepping of the two-dimensional problem.
//!
//! Each step solves `(I + τL₁)ū = u^k + τg₁` row by row and then
//! `(I + τL₂)û = ū + τg₂` column by column. The mixed derivative belongs to
//! `L₂` and is evaluated explicitly from the half-step field `ū`, so every
//! column stays tridiagonal.
//!
//! Boundary handling: the x-sweep imposes Dirichlet data on the columns
//! `x = 0` and `x = X` but evolves the rows `y = ζ` and `y = Y` with the same
//! x-operator; the y-sweep imposes Dirichlet data on those rows and evolves
//! the edge columns with one-sided mixed stencils.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bs1d::{make_boundary_profiles, BoundaryProfiles};
use crate::csvfmt::num;
use crate::error::{Error, Result};
use crate::line::{fitted_line_matrix, LineCoeffs};
use crate::mesh::Grid2D;
use crate::model::{
    mixed_coefficient, xsweep_coefficients, ysweep_coefficients, DomainBox, MarketParams, Payoff,
    SourceSplit, XSweepCoeffs, YSweepCoeffs,
};
use crate::tridiag::{check_m_matrix, MMatrixReport, ThomasFactorization, TridiagonalSystem};

/// `f(x, y, t)`, shared across threads.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Where the Dirichlet data comes from.
#[derive(Clone)]
pub enum BoundaryKind {
    /// Payoff extension in x and 1D Black–Scholes solves in y (or the
    /// deterministic-growth price on `y = 0`).
    Pricing,
    /// Zero on every edge.
    Homogeneous,
    /// A known solution sampled on the edges.
    Exact(SpaceTimeFn),
}

impl fmt::Debug for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKind::Pricing => f.write_str("Pricing"),
            BoundaryKind::Homogeneous => f.write_str("Homogeneous"),
            BoundaryKind::Exact(_) => f.write_str("Exact(..)"),
        }
    }
}

/// A complete problem: coefficients, box, initial data, edges and source.
#[derive(Clone)]
pub struct Problem {
    pub params: MarketParams,
    pub domain: DomainBox,
    /// Initial data `u⁰(x) = u_T(x)`.
    pub payoff: Payoff,
    pub boundary: BoundaryKind,
    pub source: Option<SpaceTimeFn>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("payoff", &self.payoff)
            .field("boundary", &self.boundary)
            .field("source", &self.source.as_ref().map(|_| ".."))
            .finish()
    }
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.domain.validate()?;
        self.payoff.validate(self.domain.x_max)
    }

    pub fn boundaries(&self, grid: &Grid2D, steps: usize) -> Result<BoundaryProfiles> {
        let tau = self.domain.t_max / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * tau).collect();
        match &self.boundary {
            BoundaryKind::Pricing => {
                make_boundary_profiles(&self.params, &self.domain, &self.payoff, grid, steps)
            }
            BoundaryKind::Homogeneous => Ok(BoundaryProfiles::homogeneous(grid, times)),
            BoundaryKind::Exact(f) => {
                Ok(BoundaryProfiles::from_fn(grid, times, |x, y, t| f(x, y, t)))
            }
        }
    }

    pub fn initial_field(&self, grid: &Grid2D) -> Field2D {
        let row: Vec<f64> = grid
            .x
            .nodes()
            .iter()
            .map(|&x| self.payoff.value(x))
            .collect();
        let mut values = Vec::with_capacity(grid.nx() * grid.ny());
        for _ in 0..grid.ny() {
            values.extend_from_slice(&row);
        }
        Field2D::from_values(grid.nx(), grid.ny(), values, 0.0)
    }

    fn check_grid(&self, grid: &Grid2D) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
        let d = &self.domain;
        if !(close(grid.x.lo(), 0.0)
            && close(grid.x.hi(), d.x_max)
            && close(grid.y.lo(), d.zeta)
            && close(grid.y.hi(), d.y_max))
        {
            return Err(Error::InvalidParameter(format!(
                "grid [{}, {}] x [{}, {}] does not cover the box [0, {}] x [{}, {}]",
                grid.x.lo(),
                grid.x.hi(),
                grid.y.lo(),
                grid.y.hi(),
                d.x_max,
                d.zeta,
                d.y_max
            )));
        }
        Ok(())
    }
}

/// Nodal values, row-major in `j` (index `j·nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    pub time: f64,
}

impl Field2D {
    pub fn zeros(nx: usize, ny: usize, time: f64) -> Self {
        Self {
            nx,
            ny,
            values: vec![0.0; nx * ny],
            time,
        }
    }

    pub fn from_values(nx: usize, ny: usize, values: Vec<f64>, time: f64) -> Self {
        assert_eq!(values.len(), nx * ny, "field size");
        Self {
            nx,
            ny,
            values,
            time,
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: &Grid2D, time: f64, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.nx() * grid.ny());
        for &y in grid.y.nodes() {
            values.extend(grid.x.nodes().iter().map(|&x| f(x, y)));
        }
        Self::from_values(grid.nx(), grid.ny(), values, time)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.nx..(j + 1) * self.nx]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.ny).map(|j| self.get(i, j)).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        if self.nx != other.nx || self.ny != other.ny {
            return Err(Error::Dimension(format!(
                "field shapes {}x{} and {}x{} differ",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field2D::from_values(self.nx, self.ny, values, self.time))
    }

    /// CSV with columns `i,j,x,y,value`.
    pub fn to_csv(&self, grid: &Grid2D) -> String {
        let mut out = String::with_capacity(self.values.len() * 64);
        out.push_str("i,j,x,y,value\n");
        for j in 0..self.ny {
            let y = num(grid.y.nodes()[j]);
            for i in 0..self.nx {
                out.push_str(&format!(
                    "{i},{j},{},{y},{}\n",
                    num(grid.x.nodes()[i]),
                    num(self.get(i, j))
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LodConfig {
    /// Number of time steps `K`; `τ = T/K`.
    pub steps: usize,
    pub split: SourceSplit,
    /// Step indices whose fields are kept.
    pub snapshot_steps: Vec<usize>,
    pub parallel: bool,
}

impl LodConfig {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            split: SourceSplit::default(),
            snapshot_steps: Vec::new(),
            parallel: true,
        }
    }
}

/// x-sweep system for the row `y = y_j`: Dirichlet rows at both ends and
/// right-hand side `ħ_i u^k_i / τ + ħ_i g₁`.
pub fn assemble_x_row(
    grid: &Grid2D,
    coeffs: &XSweepCoeffs,
    tau: f64,
    prev_row: &[f64],
    g1_row: &[f64],
    dirichlet: (f64, f64),
) -> Result<TridiagonalSystem> {
    let nx = grid.nx();
    if prev_row.len() != nx || g1_row.len() != nx {
        return Err(Error::Dimension(format!(
            "x row needs {nx} values, got {} and {}",
            prev_row.len(),
            g1_row.len()
        )));
    }
    let line = LineCoeffs {
        a: coeffs.a_bar,
        b: coeffs.b_bar,
        c: coeffs.c1,
    };
    let mut sys = fitted_line_matrix(&grid.x, line, tau)?;
    let dual = grid.x.dual_widths();
    for i in 1..nx - 1 {
        sys.rhs[i] = dual[i] * (prev_row[i] / tau + g1_row[i]);
    }
    sys.rhs[0] = dirichlet.0;
    sys.rhs[nx - 1] = dirichlet.1;
    Ok(sys)
}

/// y-sweep system for one column: Dirichlet rows at `ζ` and `Y`, right-hand
/// side `ħ_j ū_j / τ + mixed_j + ħ_j g₂`.
pub fn assemble_y_column(
    grid: &Grid2D,
    coeffs: &YSweepCoeffs,
    tau: f64,
    half_col: &[f64],
    mixed_col: &[f64],
    g2_col: &[f64],
    dirichlet: (f64, f64),
) -> Result<TridiagonalSystem> {
    let ny = grid.ny();
    if half_col.len() != ny || mixed_col.len() != ny || g2_col.len() != ny {
        return Err(Error::Dimension(format!("y column needs {ny} values")));
    }
    let line = LineCoeffs {
        a: coeffs.a_hat,
        b: coeffs.b_hat,
        c: coeffs.c2,
    };
    let mut sys = fitted_line_matrix(&grid.y, line, tau)?;
    let dual = grid.y.dual_widths();
    for j in 1..ny - 1 {
        sys.rhs[j] = dual[j] * (half_col[j] / tau + g2_col[j]) + mixed_col[j];
    }
    sys.rhs[0] = dirichlet.0;
    sys.rhs[ny - 1] = dirichlet.1;
    Ok(sys)
}

/// Control-volume integral of `(k u_x)_y` at node `(i, j)`, `1 <= j <= M-1`.
/// `k_above = ρξ y_{j+1/2}^{3/2}` and `k_below` likewise, without the `x` factor.
#[inline]
fn mixed_stencil(
    u: &Field2D,
    grid: &Grid2D,
    i: usize,
    j: usize,
    k_above: f64,
    k_below: f64,
) -> f64 {
    let n = grid.nx() - 1;
    let x = grid.x.nodes()[i];
    let h = grid.x.primal_widths();
    let g = |ii: usize, jj: usize| u.get(ii, jj);
    if i == 0 || i == n {
        // one-sided difference in x
        let (a, b) = if i == 0 { (1, 0) } else { (n, n - 1) };
        let hh = h[if i == 0 { 0 } else { n - 1 }];
        let up = (g(a, j + 1) - g(b, j + 1) + g(a, j) - g(b, j)) / hh;
        let down = (g(a, j) - g(b, j) + g(a, j - 1) - g(b, j - 1)) / hh;
        return 0.5 * x * (k_above * up - k_below * down);
    }
    let (hp, hm) = (h[i], h[i - 1]);
    let up = (g(i + 1, j + 1) - g(i, j + 1) + g(i + 1, j) - g(i, j)) / hp
        + (g(i, j + 1) - g(i - 1, j + 1) + g(i, j) - g(i - 1, j)) / hm;
    let down = (g(i + 1, j) - g(i, j) + g(i + 1, j - 1) - g(i, j - 1)) / hp
        + (g(i, j) - g(i - 1, j) + g(i, j - 1) - g(i - 1, j - 1)) / hm;
    0.25 * x * (k_above * up - k_below * down)
}

/// Explicit mixed-derivative term `[k u_x]` across the control volume of
/// `(i, j)`, evaluated from `u_half`.
pub fn mixed_term(
    u_half: &Field2D,
    grid: &Grid2D,
    params: &MarketParams,
    i: usize,
    j: usize,
) -> f64 {
    let ya = grid.y.face_above(j);
    let yb = grid.y.face_below(j);
    mixed_stencil(
        u_half,
        grid,
        i,
        j,
        mixed_coefficient(params, 1.0, ya),
        mixed_coefficient(params, 1.0, yb),
    )
}

/// M-matrix outcome for every sweep matrix of a stepper. The matrices do not
/// change between time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrixReport {
    /// One report per x-sweep row `j = 0..=M`.
    pub x_rows: Vec<MMatrixReport>,
    /// The y-sweep matrix, shared by all columns.
    pub y_columns: MMatrixReport,
    pub y_column_count: usize,
}

impl SweepMatrixReport {
    pub fn all_pass(&self) -> bool {
        self.x_rows.iter().all(|r| r.is_m_matrix_after_reduction)
            && self.y_columns.is_m_matrix_after_reduction
    }

    /// `(sweep, index)` of each failing system.
    pub fn failures(&self) -> Vec<(&'static str, usize)> {
        let mut out: Vec<(&'static str, usize)> = self
            .x_rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_m_matrix_after_reduction)
            .map(|(j, _)| ("x", j))
            .collect();
        if !self.y_columns.is_m_matrix_after_reduction {
            out.extend((0..self.y_column_count).map(|i| ("y", i)));
        }
        out
    }

    pub fn systems_checked(&self) -> usize {
        self.x_rows.len() + self.y_column_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    pub min_value: f64,
    pub min_half_step: f64,
    /// Interior right-hand-side entries below zero in the x and y sweeps.
    pub negative_load_x: usize,
    pub negative_load_y: usize,
    pub m_matrix_ok: bool,
}

/// Precomputed sweep operators for one grid, coefficient set and `τ`.
pub struct LodStepper {
    grid: Grid2D,
    tau: f64,
    split: SourceSplit,
    source: Option<SpaceTimeFn>,
    x_factors: Vec<ThomasFactorization>,
    y_factor: ThomasFactorization,
    /// `ρξ y_{j+1/2}^{3/2}` for the faces `j = 0..=M+1` in [`crate::mesh::Axis::faces`] order.
    k_faces: Vec<f64>,
    report: SweepMatrixReport,
    parallel: bool,
}

impl LodStepper {
    pub fn new(
        problem: &Problem,
        grid: &Grid2D,
        tau: f64,
        split: SourceSplit,
        parallel: bool,
    ) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {tau}"
            )));
        }
        let params = problem.params;
        let mut x_factors = Vec::with_capacity(grid.ny());
        let mut x_rows = Vec::with_capacity(grid.ny());
        for (j, &y) in grid.y.nodes().iter().enumerate() {
            let c = xsweep_coefficients(&params, y);
            let sys = fitted_line_matrix(
                &grid.x,
                LineCoeffs {
                    a: c.a_bar,
                    b: c.b_bar,
                    c: c.c1,
                },
                tau,
            )?;
            x_rows.push(check_m_matrix(&sys));
            x_factors.push(
                ThomasFactorization::new(&sys.lower, &sys.diag, &sys.upper).map_err(|e| {
                    Error::Sweep {
                        sweep: "x",
                        index_name: "row",
                        index: j,
                        source: Box::new(e),
                    }
                })?,
            );
        }
        let yc = ysweep_coefficients(&params, 0.0, 0.0);
        let ysys = fitted_line_matrix(
            &grid.y,
            LineCoeffs {
                a: yc.a_hat,
                b: yc.b_hat,
                c: yc.c2,
            },
            tau,
        )?;
        let y_report = check_m_matrix(&ysys);
        let y_factor =
            ThomasFactorization::new(&ysys.lower, &ysys.diag, &ysys.upper).map_err(|e| {
                Error::Sweep {
                    sweep: "y",
                    index_name: "column",
                    index: 0,
                    source: Box::new(e),
                }
            })?;
        let k_faces = grid
            .y
            .faces()
            .iter()
            .map(|&y| mixed_coefficient(&params, 1.0, y))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            tau,
            split,
            source: problem.source.clone(),
            x_factors,
            y_factor,
            k_faces,
            report: SweepMatrixReport {
                x_rows,
                y_columns: y_report,
                y_column_count: grid.nx(),
            },
            parallel,
        })
    }

    pub fn matrix_report(&self) -> &SweepMatrixReport {
        &self.report
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn source_at(&self, x: f64, y: f64, t: f64) -> f64 {
        self.source.as_ref().map_or(0.0, |g| g(x, y, t))
    }

    fn check_level(&self, bounds: &BoundaryProfiles, level: usize) -> Result<()> {
        if level >= bounds.levels() {
            return Err(Error::Dimension(format!(
                "boundary data has {} levels, step needs level {level}",
                bounds.levels()
            )));
        }
        Ok(())
    }

    /// Half step `ū` at `t_level` from `state` at `t_{level-1}`. Returns the
    /// field and the number of negative interior load entries.
    pub fn x_sweep(
        &self,
        state: &Field2D,
        bounds: &BoundaryProfiles,
        level: usize,
    ) -> Result<(Field2D, usize)> {
        self.check_level(bounds, level)?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        if state.nx() != nx || state.ny() != ny {
            return Err(Error::Dimension("state does not match the grid".into()));
        }
        let t = bounds.times[level];
        let dual = self.grid.x.dual_widths();
        let xs = self.grid.x.nodes();
        let ys = self.grid.y.nodes();
        let mut out = vec![0.0; nx * ny];
        let solve_row = |(j, row): (usize, &mut [f64])| -> usize {
            let prev = state.row(j);
            let y = ys[j];
            let mut negative = 0;
            for i in 1..nx - 1 {
                let g1 = self.split.g1(self.source_at(xs[i], y, t));
                let v = dual[i] * (prev[i] / self.tau + g1);
                if v < 0.0 {
                    negative += 1;
                }
                row[i] = v;
            }
            row[0] = bounds.left[level][j];
            row[nx - 1] = bounds.right[level][j];
            self.x_factors[j].solve_in_place(row);
            negative
        };
        let negative = if self.parallel {
            out.par_chunks_mut(nx).enumerate().map(solve_row).sum()
        } else {
            out.chunks_mut(nx).enumerate().map(solve_row).sum()
        };
        Ok((Field2D::from_values(nx, ny, out, t), negative))
    }

    /// Full step `û` at `t_level` from the half step.
    pub fn y_sweep(
        &self,
        half: &Field2D,
        bounds: &BoundaryProfiles,
        level: usize,
    ) -> Result<(Field2D, usize)> {
        self.check_level(bounds, level)?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        if half.nx() != nx || half.ny() != ny {
            return Err(Error::Dimension(
                "half-step field does not match the grid".into(),
            ));
        }
        let t = bounds.times[level];
        let dual = self.grid.y.dual_widths();
        let xs = self.grid.x.nodes();
        let ys = self.grid.y.nodes();
        let mut cols = vec![0.0; nx * ny];
        let solve_col = |(i, col): (usize, &mut [f64])| -> usize {
            let x = xs[i];
            let mut negative = 0;
            for j in 1..ny - 1 {
                let g2 = self.split.g2(self.source_at(x, ys[j], t));
                let mixed =
                    mixed_stencil(half, &self.grid, i, j, self.k_faces[j + 1], self.k_faces[j]);
                let v = dual[j] * (half.get(i, j) / self.tau + g2) + mixed;
                if v < 0.0 {
                    negative += 1;
                }
                col[j] = v;
            }
            col[0] = bounds.bottom[level][i];
            col[ny - 1] = bounds.top[level][i];
            self.y_factor.solve_in_place(col);
            negative
        };
        let negative = if self.parallel {
            cols.par_chunks_mut(ny).enumerate().map(solve_col).sum()
        } else {
            cols.chunks_mut(ny).enumerate().map(solve_col).sum()
        };
        let mut out = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                out[j * nx + i] = cols[i * ny + j];
            }
        }
        Ok((Field2D::from_values(nx, ny, out, t), negative))
    }

    /// `y_sweep ∘ x_sweep` from `t_{level-1}` to `t_level`.
    pub fn advance(
        &self,
        state: &Field2D,
        bounds: &BoundaryProfiles,
        level: usize,
    ) -> Result<(Field2D, StepDiagnostics)> {
        let (half, neg_x) = self.x_sweep(state, bounds, level)?;
        let (full, neg_y) = self.y_sweep(&half, bounds, level)?;
        let diag = StepDiagnostics {
            step: level,
            time: full.time,
            min_value: full.min(),
            min_half_step: half.min(),
            negative_load_x: neg_x,
            negative_load_y: neg_y,
            m_matrix_ok: self.report.all_pass(),
        };
        Ok((full, diag))
    }
}

#[derive(Debug, Clone)]
pub struct SolveRecord {
    pub final_field: Field2D,
    pub snapshots: Vec<(usize, Field2D)>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub m_matrix: Option<SweepMatrixReport>,
}

impl SolveRecord {
    pub fn min_over_steps(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.min_value)
            .fold(self.final_field.min(), f64::min)
    }
}

/// Marches `K` steps from the payoff.
pub fn solve(problem: &Problem, grid: &Grid2D, config: &LodConfig) -> Result<SolveRecord> {
    problem.validate()?;
    problem.check_grid(grid)?;
    let initial = problem.initial_field(grid);
    let mut snapshots = Vec::new();
    if config.snapshot_steps.contains(&0) {
        snapshots.push((0, initial.clone()));
    }
    if config.steps == 0 {
        return Ok(SolveRecord {
            final_field: initial,
            snapshots,
            diagnostics: Vec::new(),
            m_matrix: None,
        });
    }
    let tau = problem.domain.t_max / config.steps as f64;
    let bounds = problem.boundaries(grid, config.steps)?;
    let stepper = LodStepper::new(problem, grid, tau, config.split, config.parallel)?;
    let mut state = initial;
    let mut diagnostics = Vec::with_capacity(config.steps);
    for level in 1..=config.steps {
        let (next, diag) = stepper.advance(&state, &bounds, level)?;
        if !next.all_finite() {
            return Err(Error::NonFinite { step: level });
        }
        state = next;
        diagnostics.push(diag);
        if config.snapshot_steps.contains(&level) {
            snapshots.push((level, state.clone()));
        }
    }
    Ok(SolveRecord {
        final_field: state,
        snapshots,
        diagnostics,
        m_matrix: Some(stepper.report.clone()),
    })
}
