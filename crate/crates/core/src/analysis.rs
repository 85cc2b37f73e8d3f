//! Error norms, double-mesh rates and convergence studies.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::csvfmt::num;
use crate::error::{Error, Result};
use crate::lod::{solve, Field2D, LodConfig, Problem, SpaceTimeFn};
use crate::mesh::{AxisSpec, Grid2D};
use crate::model::SourceSplit;

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Region {
    pub fn whole(grid: &Grid2D) -> Self {
        Self {
            x0: grid.x.lo(),
            x1: grid.x.hi(),
            y0: grid.y.lo(),
            y1: grid.y.hi(),
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let tol = |a: f64, b: f64| 1e-12 * (1.0 + a.abs().max(b.abs()));
        x >= self.x0 - tol(self.x0, x)
            && x <= self.x1 + tol(self.x1, x)
            && y >= self.y0 - tol(self.y0, y)
            && y <= self.y1 + tol(self.y1, y)
    }

    /// Number of grid nodes inside, edges inclusive.
    pub fn node_count(&self, grid: &Grid2D) -> usize {
        let nx = grid
            .x
            .nodes()
            .iter()
            .filter(|&&x| self.contains(x, self.y0))
            .count();
        let ny = grid
            .y
            .nodes()
            .iter()
            .filter(|&&y| self.contains(self.x0, y))
            .count();
        nx * ny
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNorms {
    pub c_norm: f64,
    pub l2_norm: f64,
    pub rmse: f64,
}

/// Maximum norm, dual-cell weighted `L2` norm over the whole grid, and the
/// root mean square over the nodes inside `region`.
pub fn grid_norms(err: &Field2D, grid: &Grid2D, region: &Region) -> Result<GridNorms> {
    if err.nx() != grid.nx() || err.ny() != grid.ny() {
        return Err(Error::Dimension(format!(
            "error field {}x{} on grid {}x{}",
            err.nx(),
            err.ny(),
            grid.nx(),
            grid.ny()
        )));
    }
    if !err.all_finite() {
        return Err(Error::InvalidParameter(
            "error field has non-finite values".into(),
        ));
    }
    let hx = grid.x.dual_widths();
    let hy = grid.y.dual_widths();
    let mut c: f64 = 0.0;
    let mut l2 = 0.0;
    let mut sq = 0.0;
    let mut count = 0usize;
    for (j, &y) in grid.y.nodes().iter().enumerate() {
        for (i, &x) in grid.x.nodes().iter().enumerate() {
            let e = err.get(i, j);
            c = c.max(e.abs());
            l2 += hx[i] * hy[j] * e * e;
            if region.contains(x, y) {
                sq += e * e;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptyRegion {
            x0: region.x0,
            x1: region.x1,
            y0: region.y0,
            y1: region.y1,
        });
    }
    Ok(GridNorms {
        c_norm: c,
        l2_norm: l2.sqrt(),
        rmse: (sq / count as f64).sqrt(),
    })
}

/// `log₂(e_coarse / e_fine)`; `None` unless both errors are positive.
pub fn convergence_rate(e_coarse: f64, e_fine: f64) -> Option<f64> {
    if e_coarse > 0.0 && e_fine > 0.0 && e_coarse.is_finite() && e_fine.is_finite() {
        Some((e_coarse / e_fine).log2())
    } else {
        None
    }
}

/// Value of `field` at `(x, y)` by bilinear interpolation on `grid`.
pub fn sample_bilinear(field: &Field2D, grid: &Grid2D, x: f64, y: f64) -> f64 {
    let i = grid.x.locate(x);
    let j = grid.y.locate(y);
    let (x0, x1) = (grid.x.nodes()[i], grid.x.nodes()[i + 1]);
    let (y0, y1) = (grid.y.nodes()[j], grid.y.nodes()[j + 1]);
    let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    let t = ((y - y0) / (y1 - y0)).clamp(0.0, 1.0);
    let f = |a, b| field.get(a, b);
    (1.0 - s) * (1.0 - t) * f(i, j)
        + s * (1.0 - t) * f(i + 1, j)
        + (1.0 - s) * t * f(i, j + 1)
        + s * t * f(i + 1, j + 1)
}

/// Index of each coarse node in the fine axis, if every coarse node is a fine node.
fn nested_indices(coarse: &[f64], fine: &[f64]) -> Option<Vec<usize>> {
    let scale = fine.last().map_or(1.0, |v| v.abs().max(1.0));
    let mut out = Vec::with_capacity(coarse.len());
    let mut k = 0;
    for &c in coarse {
        while k < fine.len() && fine[k] < c - 1e-12 * scale {
            k += 1;
        }
        if k == fine.len() || (fine[k] - c).abs() > 1e-12 * scale {
            return None;
        }
        out.push(k);
    }
    Some(out)
}

/// `fine` restricted to the nodes of `coarse`: injection for nested grids,
/// bilinear interpolation otherwise.
pub fn restrict_to(fine: &Field2D, fine_grid: &Grid2D, coarse: &Grid2D) -> Field2D {
    let nested = nested_indices(coarse.x.nodes(), fine_grid.x.nodes())
        .zip(nested_indices(coarse.y.nodes(), fine_grid.y.nodes()));
    match nested {
        Some((ix, iy)) => {
            let mut out = Field2D::zeros(coarse.nx(), coarse.ny(), fine.time);
            for (j, &jf) in iy.iter().enumerate() {
                for (i, &i_f) in ix.iter().enumerate() {
                    out.set(i, j, fine.get(i_f, jf));
                }
            }
            out
        }
        None => Field2D::from_fn(coarse, fine.time, |x, y| {
            sample_bilinear(fine, fine_grid, x, y)
        }),
    }
}

/// One mesh of a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshLevel {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub steps: usize,
}

impl MeshLevel {
    pub fn label(&self) -> String {
        format!(
            "{}x{}x{}",
            self.x.intervals(),
            self.y.intervals(),
            self.steps
        )
    }
}

/// What the ladder runs are compared against.
#[derive(Clone)]
pub enum StudyTarget {
    Exact(SpaceTimeFn),
    FineReference(MeshLevel),
}

#[derive(Clone)]
pub struct StudyConfig {
    pub title: String,
    pub problem: Problem,
    pub levels: Vec<MeshLevel>,
    pub target: StudyTarget,
    /// RMSE region; `None` means the whole box.
    pub region: Option<Region>,
    pub split: SourceSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub steps: usize,
    pub norms: GridNorms,
    pub rc_c: Option<f64>,
    pub rc_l2: Option<f64>,
    pub rc_rmse: Option<f64>,
    /// Smallest value of the computed solution over all time levels.
    pub min_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub title: String,
    pub rows: Vec<ConvergenceRow>,
}

fn rc_text(rc: Option<f64>) -> String {
    rc.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn rc_csv(rc: Option<f64>) -> String {
    rc.map_or_else(String::new, num)
}

impl ConvergenceTable {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        let _ = writeln!(
            s,
            "{:<16} {:>12} {:>7} {:>12} {:>7} {:>12} {:>7}",
            "mesh", "E_C", "RC", "E_L2", "RC", "RMSE", "RC"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<16} {:>12.3e} {:>7} {:>12.3e} {:>7} {:>12.3e} {:>7}",
                r.label,
                r.norms.c_norm,
                rc_text(r.rc_c),
                r.norms.l2_norm,
                rc_text(r.rc_l2),
                r.norms.rmse,
                rc_text(r.rc_rmse)
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("mesh,n,m,k,c_norm,rc_c,l2_norm,rc_l2,rmse,rc_rmse,min_value\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.label,
                r.n,
                r.m,
                r.steps,
                num(r.norms.c_norm),
                rc_csv(r.rc_c),
                num(r.norms.l2_norm),
                rc_csv(r.rc_l2),
                num(r.norms.rmse),
                rc_csv(r.rc_rmse),
                num(r.min_value)
            );
        }
        s
    }

    pub fn rc_c(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.rc_c).collect()
    }

    pub fn rc_rmse(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.rc_rmse).collect()
    }
}

fn run_level(
    problem: &Problem,
    level: &MeshLevel,
    split: SourceSplit,
) -> Result<(Grid2D, Field2D, f64)> {
    let grid = Grid2D::build(&level.x, &level.y, &problem.domain)?;
    let mut cfg = LodConfig::new(level.steps);
    cfg.split = split;
    let rec = solve(problem, &grid, &cfg)?;
    let min = rec.min_over_steps();
    Ok((grid, rec.final_field, min))
}

/// Runs every level and tabulates the errors with rates between consecutive rows.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceTable> {
    if config.levels.len() < 2 {
        return Err(Error::InvalidParameter(
            "a convergence study needs at least two meshes".into(),
        ));
    }
    let reference = match &config.target {
        StudyTarget::FineReference(level) => Some(run_level(&config.problem, level, config.split)?),
        StudyTarget::Exact(_) => None,
    };
    let t_end = config.problem.domain.t_max;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(config.levels.len());
    for level in &config.levels {
        let (grid, field, min_value) = run_level(&config.problem, level, config.split)?;
        let target = match (&config.target, &reference) {
            (StudyTarget::Exact(f), _) => Field2D::from_fn(&grid, t_end, |x, y| f(x, y, t_end)),
            (_, Some((fine_grid, fine, _))) => restrict_to(fine, fine_grid, &grid),
            _ => return Err(Error::Internal("reference run missing".into())),
        };
        let err = field.sub(&target)?;
        let region = config.region.unwrap_or_else(|| Region::whole(&grid));
        let norms = grid_norms(&err, &grid, &region)?;
        let prev = rows.last().map(|r| r.norms);
        rows.push(ConvergenceRow {
            label: level.label(),
            n: level.x.intervals(),
            m: level.y.intervals(),
            steps: level.steps,
            norms,
            rc_c: prev.and_then(|p| convergence_rate(p.c_norm, norms.c_norm)),
            rc_l2: prev.and_then(|p| convergence_rate(p.l2_norm, norms.l2_norm)),
            rc_rmse: prev.and_then(|p| convergence_rate(p.rmse, norms.rmse)),
            min_value,
        });
    }
    Ok(ConvergenceTable {
        title: config.title.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DomainBox;
    use crate::problems::{manufactured, pricing_params};

    fn grid(n: usize, m: usize, d: &DomainBox) -> Grid2D {
        Grid2D::build(&AxisSpec::Uniform { n }, &AxisSpec::Uniform { n: m }, d).unwrap()
    }

    fn unit() -> DomainBox {
        DomainBox {
            x_max: 1.0,
            y_max: 1.0,
            t_max: 1.0,
            zeta: 0.0,
        }
    }

    #[test]
    fn unit_error_norms() {
        let g = grid(10, 7, &unit());
        let e = Field2D::from_fn(&g, 0.0, |_, _| 1.0);
        let n = grid_norms(&e, &g, &Region::whole(&g)).unwrap();
        assert!((n.c_norm - 1.0).abs() < 1e-15);
        assert!((n.l2_norm - 1.0).abs() < 1e-14);
        assert!((n.rmse - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spike_sets_c_norm_and_l2_cell() {
        let g = grid(8, 8, &unit());
        let mut e = Field2D::zeros(9, 9, 0.0);
        e.set(3, 5, -5.0);
        let n = grid_norms(&e, &g, &Region::whole(&g)).unwrap();
        assert_eq!(n.c_norm, 5.0);
        let expect = (g.x.dual_widths()[3] * g.y.dual_widths()[5]).sqrt() * 5.0;
        assert!((n.l2_norm - expect).abs() < 1e-14);
        assert!(n.c_norm >= n.rmse);
    }

    #[test]
    fn region_count_is_inclusive() {
        let d = DomainBox {
            x_max: 100.0,
            y_max: 1.0,
            t_max: 1.0,
            zeta: 0.01,
        };
        let g = grid(128, 128, &d);
        let r = Region {
            x0: 0.0,
            x1: 10.0,
            y0: 0.01,
            y1: 1.0,
        };
        // x_i = 100 i / 128 <= 10 for i = 0..=12
        assert_eq!(r.node_count(&g), 13 * 129);
        let g = grid(10, 4, &d);
        assert_eq!(r.node_count(&g), 2 * 5);
    }

    #[test]
    fn empty_region_is_an_error() {
        let g = grid(4, 4, &unit());
        let r = Region {
            x0: 0.3,
            x1: 0.4,
            y0: 0.0,
            y1: 1.0,
        };
        let e = Field2D::zeros(5, 5, 0.0);
        assert!(matches!(
            grid_norms(&e, &g, &r),
            Err(Error::EmptyRegion { .. })
        ));
    }

    #[test]
    fn rates() {
        assert_eq!(convergence_rate(0.4, 0.2), Some(1.0));
        assert_eq!(convergence_rate(0.3, 0.3), Some(0.0));
        assert!((convergence_rate(5.305e-3, 1.950e-3).unwrap() - 1.44387862716515).abs() < 1e-12);
        assert_eq!(convergence_rate(0.0, 0.1), None);
        assert_eq!(convergence_rate(0.1, -1.0), None);
    }

    #[test]
    fn restriction_injects_on_nested_grids_and_interpolates_otherwise() {
        let d = unit();
        let fine = grid(8, 8, &d);
        let f = Field2D::from_fn(&fine, 0.0, |x, y| 2.0 * x + 3.0 * y + x * y);
        let coarse = grid(4, 2, &d);
        let r = restrict_to(&f, &fine, &coarse);
        assert_eq!(
            r,
            Field2D::from_fn(&coarse, 0.0, |x, y| 2.0 * x + 3.0 * y + x * y)
        );
        let odd = grid(3, 3, &d);
        let r = restrict_to(&f, &fine, &odd);
        for j in 0..4 {
            for i in 0..4 {
                let (x, y) = (odd.x.nodes()[i], odd.y.nodes()[j]);
                // bilinear is exact for x, y, xy within a cell
                assert!((r.get(i, j) - (2.0 * x + 3.0 * y + x * y)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn self_reference_gives_zero_errors() {
        let d = DomainBox {
            zeta: 0.01,
            ..unit()
        };
        let level = MeshLevel {
            x: AxisSpec::Uniform { n: 8 },
            y: AxisSpec::Uniform { n: 8 },
            steps: 8,
        };
        let cfg = StudyConfig {
            title: "self".into(),
            problem: manufactured(pricing_params(), d),
            levels: vec![level.clone(), level.clone()],
            target: StudyTarget::FineReference(level),
            region: None,
            split: SourceSplit::default(),
        };
        let t = run_convergence_study(&cfg).unwrap();
        for r in &t.rows {
            assert_eq!(r.norms.c_norm, 0.0);
            assert_eq!(r.rc_c, None);
        }
        assert!(t.to_csv().starts_with("mesh,n,m,k,"));
    }
}
