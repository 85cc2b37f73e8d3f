//! Configuration and command implementations behind the `hwlod` binary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hwlod::analysis::sample_bilinear;
use hwlod::bs1d::{solve_bs1d, Bs1dProblem, RightBoundary};
use hwlod::csvfmt::num;
use hwlod::lod::{solve, LodConfig, Problem, SolveRecord};
use hwlod::mesh::{axis_csv, build_axis, AxisSpec, Grid2D};
use hwlod::model::{DomainBox, MarketParams, Payoff, SourceSplit};
use hwlod::problems::{self, manufactured};
use hwlod::tables::{run_table, TableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Tp1,
    Tp2,
    Tp3,
    Manufactured,
    Custom,
}

impl std::str::FromStr for ProblemKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "tp1" => ProblemKind::Tp1,
            "tp2" => ProblemKind::Tp2,
            "tp3" => ProblemKind::Tp3,
            "manufactured" => ProblemKind::Manufactured,
            "custom" => ProblemKind::Custom,
            other => {
                bail!("unknown problem '{other}', expected tp1, tp2, tp3, manufactured or custom")
            }
        })
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Artifacts {
    #[serde(default = "default_true")]
    pub final_field: bool,
    /// Time-step indices whose fields are written.
    #[serde(default)]
    pub snapshots: Vec<usize>,
    #[serde(default)]
    pub boundaries: bool,
    #[serde(default = "default_true")]
    pub diagnostics: bool,
}

impl Default for Artifacts {
    fn default() -> Self {
        Self {
            final_field: true,
            snapshots: Vec::new(),
            boundaries: false,
            diagnostics: true,
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_split() -> f64 {
    0.5
}

/// Everything needed for one run. Preset problems fill in whatever is left
/// unset; `custom` needs `params`, `domain` and `payoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MarketParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<Payoff>,
    /// Cash amount `B` of the cash-or-nothing preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cash: Option<f64>,
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
    pub steps: usize,
    #[serde(default = "default_split")]
    pub source_split: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub artifacts: Artifacts,
}

impl RunConfig {
    pub fn preset(problem: ProblemKind) -> Self {
        Self {
            problem,
            params: None,
            domain: None,
            payoff: None,
            cash: if problem == ProblemKind::Tp2 {
                Some(1.0)
            } else {
                None
            },
            x_axis: AxisSpec::Uniform { n: 64 },
            y_axis: AxisSpec::Uniform { n: 64 },
            steps: 128,
            source_split: default_split(),
            out_dir: default_out_dir(),
            artifacts: Artifacts::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("invalid run configuration")?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the problem and checks selector-specific completeness.
    pub fn build_problem(&self) -> Result<Problem> {
        let mut problem = match self.problem {
            ProblemKind::Tp1 => problems::tp1(),
            ProblemKind::Tp2 => {
                let Some(cash) = self.cash else {
                    bail!("field `cash`: the tp2 problem requires the cash amount B");
                };
                problems::tp2(cash)
            }
            ProblemKind::Tp3 => problems::tp3(),
            ProblemKind::Manufactured => manufactured(
                self.params
                    .unwrap_or_else(hwlod::tables::manufactured_set_b),
                self.domain.unwrap_or_else(problems::manufactured_unit_box),
            ),
            ProblemKind::Custom => {
                let params = self
                    .params
                    .context("field `params`: required for a custom problem")?;
                let domain = self
                    .domain
                    .context("field `domain`: required for a custom problem")?;
                let payoff = self
                    .payoff
                    .clone()
                    .context("field `payoff`: required for a custom problem")?;
                Problem {
                    params,
                    domain,
                    payoff,
                    boundary: hwlod::lod::BoundaryKind::Pricing,
                    source: None,
                }
            }
        };
        if self.problem != ProblemKind::Manufactured {
            if let Some(p) = self.params {
                problem.params = p;
            }
            if let Some(d) = self.domain {
                problem.domain = d;
            }
            if let Some(p) = &self.payoff {
                problem.payoff = p.clone();
            }
        }
        if self.cash.is_some() && self.problem != ProblemKind::Tp2 {
            bail!("field `cash`: only used by the tp2 problem");
        }
        if self.steps == 0 {
            bail!("field `steps`: at least one time step is required");
        }
        if !(0.0..=1.0).contains(&self.source_split) {
            bail!(
                "field `source_split`: must lie in [0, 1], got {}",
                self.source_split
            );
        }
        problem.params.validate().context("field `params`")?;
        problem.domain.validate().context("field `domain`")?;
        problem
            .payoff
            .validate(problem.domain.x_max)
            .context("field `payoff`")?;
        Ok(problem)
    }

    pub fn build_grid(&self, problem: &Problem) -> Result<Grid2D> {
        Grid2D::build(&self.x_axis, &self.y_axis, &problem.domain)
            .context("fields `x_axis`/`y_axis`")
    }
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(())
}

fn diagnostics_csv(rec: &SolveRecord) -> String {
    let mut s = String::from(
        "step,t,min_value,min_half_step,negative_load_x,negative_load_y,m_matrix_ok\n",
    );
    for d in &rec.diagnostics {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            d.step,
            num(d.time),
            num(d.min_value),
            num(d.min_half_step),
            d.negative_load_x,
            d.negative_load_y,
            d.m_matrix_ok
        ));
    }
    s
}

/// Outcome of a `run`.
#[derive(Debug)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub min_value: f64,
    pub m_matrix_ok: Option<bool>,
    pub steps: usize,
}

impl RunReport {
    pub fn summary(&self) -> String {
        let m = match self.m_matrix_ok {
            Some(true) => "all sweep matrices are M-matrices",
            Some(false) => "some sweep matrices fail the M-matrix check",
            None => "no sweeps performed",
        };
        let sign = if self.min_value >= -1e-12 {
            "nonnegative"
        } else {
            "NEGATIVE"
        };
        format!(
            "{} steps, min value {:.6e} ({sign}), {m}, {} files written",
            self.steps,
            self.min_value,
            self.written.len()
        )
    }
}

pub fn execute_run(cfg: &RunConfig) -> Result<RunReport> {
    let problem = cfg.build_problem()?;
    let grid = cfg.build_grid(&problem)?;
    let late: Vec<usize> = cfg
        .artifacts
        .snapshots
        .iter()
        .copied()
        .filter(|&k| k > cfg.steps)
        .collect();
    if !late.is_empty() {
        bail!(
            "field `artifacts.snapshots`: steps {late:?} exceed K = {}",
            cfg.steps
        );
    }
    let mut lod = LodConfig::new(cfg.steps);
    lod.split = SourceSplit::new(cfg.source_split)?;
    lod.snapshot_steps = cfg.artifacts.snapshots.clone();
    let rec = solve(&problem, &grid, &lod).context("solver failed")?;
    let mut written = Vec::new();
    let dir = &cfg.out_dir;
    write_file(dir, "config.json", &cfg.to_json(), &mut written)?;
    if cfg.artifacts.final_field {
        write_file(
            dir,
            "final_field.csv",
            &rec.final_field.to_csv(&grid),
            &mut written,
        )?;
    }
    for (k, field) in &rec.snapshots {
        write_file(
            dir,
            &format!("snapshot_{k:05}.csv"),
            &field.to_csv(&grid),
            &mut written,
        )?;
    }
    if cfg.artifacts.boundaries {
        let b = problem.boundaries(&grid, cfg.steps)?;
        write_file(dir, "boundaries.csv", &b.to_csv(&grid), &mut written)?;
    }
    if cfg.artifacts.diagnostics {
        write_file(dir, "diagnostics.csv", &diagnostics_csv(&rec), &mut written)?;
    }
    Ok(RunReport {
        written,
        min_value: rec.min_over_steps(),
        m_matrix_ok: rec.m_matrix.as_ref().map(|r| r.all_pass()),
        steps: cfg.steps,
    })
}

/// Runs every study of a table; writes `<id>.csv` and `<id>.txt`.
pub fn execute_table(id: TableId, out_dir: &Path) -> Result<(String, Vec<PathBuf>)> {
    let tables = run_table(id).with_context(|| format!("table {id}"))?;
    let mut csv = String::new();
    let mut text = String::new();
    for (idx, t) in tables.iter().enumerate() {
        let body = t.to_csv();
        let mut lines = body.lines();
        let header = lines.next().unwrap_or_default();
        if idx == 0 {
            csv.push_str(&format!("study,{header}\n"));
        }
        for line in lines {
            csv.push_str(&format!("\"{}\",{line}\n", t.title));
        }
        text.push_str(&t.to_text());
        text.push('\n');
    }
    let mut written = Vec::new();
    write_file(out_dir, &format!("{id}.csv"), &csv, &mut written)?;
    write_file(out_dir, &format!("{id}.txt"), &text, &mut written)?;
    Ok((text, written))
}

/// Mesh family selector for the `mesh` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Uniform,
    SinhOrigin,
    SinhStrike,
}

impl std::str::FromStr for MeshKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => MeshKind::Uniform,
            "sinh-origin" => MeshKind::SinhOrigin,
            "sinh-strike" => MeshKind::SinhStrike,
            other => bail!("unknown mesh '{other}', expected uniform, sinh-origin or sinh-strike"),
        })
    }
}

/// `d = (hi - lo)/d_div` for sinh-origin, `c = strike/c_div` for sinh-strike.
pub fn mesh_spec(
    kind: MeshKind,
    n: usize,
    lo: f64,
    hi: f64,
    d_div: f64,
    strike: f64,
    c_div: f64,
) -> AxisSpec {
    match kind {
        MeshKind::Uniform => AxisSpec::Uniform { n },
        MeshKind::SinhOrigin => AxisSpec::SinhOrigin {
            n,
            d: (hi - lo) / d_div,
        },
        MeshKind::SinhStrike => AxisSpec::SinhStrike {
            n,
            strike,
            c: strike / c_div,
        },
    }
}

pub fn execute_mesh(spec: &AxisSpec, lo: f64, hi: f64) -> Result<String> {
    let axis = build_axis(spec, lo, hi).context("invalid mesh")?;
    Ok(axis_csv(&axis))
}

pub fn execute_boundary(cfg: &RunConfig) -> Result<String> {
    let problem = cfg.build_problem()?;
    let grid = cfg.build_grid(&problem)?;
    let b = problem.boundaries(&grid, cfg.steps)?;
    Ok(b.to_csv(&grid))
}

/// Final-time slice of the 2D solution at `y = σ²` next to the 1D solution
/// with volatility `σ` on the same x-axis.
pub fn execute_compare_1d(cfg: &RunConfig, sigma: f64) -> Result<String> {
    let problem = cfg.build_problem()?;
    let grid = cfg.build_grid(&problem)?;
    let y = sigma * sigma;
    let d = problem.domain;
    if !(y >= d.zeta && y <= d.y_max) {
        bail!(
            "sigma {sigma} gives y = {y}, outside the variance range [{}, {}]",
            d.zeta,
            d.y_max
        );
    }
    let mut lod = LodConfig::new(cfg.steps);
    lod.split = SourceSplit::new(cfg.source_split)?;
    let rec = solve(&problem, &grid, &lod).context("2D solve failed")?;
    let one_d = solve_bs1d(&Bs1dProblem {
        sigma,
        r: problem.params.r,
        payoff: problem.payoff.clone(),
        axis: grid.x.clone(),
        steps: cfg.steps,
        t_max: d.t_max,
        right: if d.zeta == 0.0 {
            RightBoundary::Discounted
        } else {
            RightBoundary::Payoff
        },
    })
    .context("1D solve failed")?;
    let last = one_d.profiles.last().context("1D solution is empty")?;
    let mut s = String::from("i,x,y,value_2d,value_1d\n");
    for (i, &x) in grid.x.nodes().iter().enumerate() {
        let v2 = sample_bilinear(&rec.final_field, &grid, x, y);
        s.push_str(&format!(
            "{i},{},{},{},{}\n",
            num(x),
            num(y),
            num(v2),
            num(last[i])
        ));
    }
    Ok(s)
}
