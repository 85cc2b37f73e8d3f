//! Convergence-table protocols `t1` to `t6`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    run_convergence_study, ConvergenceTable, MeshLevel, Region, StudyConfig, StudyTarget,
};
use crate::error::{Error, Result};
use crate::mesh::AxisSpec;
use crate::model::{DomainBox, MarketParams, SourceSplit};
use crate::problems::{
    manufactured, manufactured_exact, manufactured_unit_box, tp1, tp1_with_zeta, tp2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::T1,
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::T5,
        TableId::T6,
    ];
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableId::T1 => "t1",
            TableId::T2 => "t2",
            TableId::T3 => "t3",
            TableId::T4 => "t4",
            TableId::T5 => "t5",
            TableId::T6 => "t6",
        };
        f.write_str(s)
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("unknown table id '{s}', expected t1..t6"))
            })
    }
}

/// `ρ = 0.5, r = 0, μ = 0`.
pub fn manufactured_set_a() -> MarketParams {
    MarketParams {
        r: 0.0,
        xi: 1.0,
        mu: 0.0,
        rho: 0.5,
        beta: 0.0,
    }
}

/// `ρ = 0.9, r = 0.1, μ = 0.1`.
pub fn manufactured_set_b() -> MarketParams {
    MarketParams {
        r: 0.1,
        xi: 1.0,
        mu: 0.1,
        rho: 0.9,
        beta: 0.0,
    }
}

fn square(x: AxisSpec, n: usize, steps: usize) -> MeshLevel {
    MeshLevel {
        x: x.with_intervals(n),
        y: AxisSpec::Uniform { n },
        steps,
    }
}

fn uniform(n: usize) -> AxisSpec {
    AxisSpec::Uniform { n }
}

fn exact_study(
    title: String,
    params: MarketParams,
    domain: DomainBox,
    levels: Vec<MeshLevel>,
    region: Option<Region>,
) -> StudyConfig {
    StudyConfig {
        title,
        problem: manufactured(params, domain),
        levels,
        target: StudyTarget::Exact(Arc::new(move |x, y, t| manufactured_exact(params, x, y, t))),
        region,
        split: SourceSplit::default(),
    }
}

fn param_label(p: &MarketParams) -> String {
    format!("rho={} r={} mu={}", p.rho, p.r, p.mu)
}

fn strike_region(strike: f64, domain: &DomainBox) -> Region {
    Region {
        x0: 0.9 * strike,
        x1: 1.1 * strike,
        y0: domain.zeta,
        y1: domain.y_max,
    }
}

/// Spatial ladder `8²..128²` at `K = 4096` against the manufactured solution.
pub fn t1_study(params: MarketParams) -> StudyConfig {
    let levels = [8, 16, 32, 64, 128]
        .iter()
        .map(|&n| square(uniform(n), n, 4096))
        .collect();
    exact_study(
        format!("t1 spatial convergence, {}", param_label(&params)),
        params,
        manufactured_unit_box(),
        levels,
        None,
    )
}

/// Temporal ladder `K = 16..256` on a `512²` grid.
pub fn t2_study(params: MarketParams) -> StudyConfig {
    let levels = [16, 32, 64, 128, 256]
        .iter()
        .map(|&k| square(uniform(512), 512, k))
        .collect();
    exact_study(
        format!("t2 temporal convergence, {}", param_label(&params)),
        params,
        manufactured_unit_box(),
        levels,
        None,
    )
}

/// Box of the graded-mesh study: `X = 100` with the unit variance range.
pub fn t3_domain() -> DomainBox {
    DomainBox {
        x_max: 100.0,
        ..manufactured_unit_box()
    }
}

/// `N × 128` ladder, `K = 1024`, RMSE on `[0, 0.1X] × [ζ, Y]`; `graded` picks
/// the sinh mesh with `d = X/700` instead of the uniform one.
pub fn t3_study(graded: bool) -> StudyConfig {
    let domain = t3_domain();
    let x = if graded {
        AxisSpec::SinhOrigin {
            n: 16,
            d: domain.x_max / 700.0,
        }
    } else {
        uniform(16)
    };
    let levels = [16, 32, 64, 128]
        .iter()
        .map(|&n| MeshLevel {
            x: x.with_intervals(n),
            y: uniform(128),
            steps: 1024,
        })
        .collect();
    let region = Region {
        x0: 0.0,
        x1: 0.1 * domain.x_max,
        y0: domain.zeta,
        y1: domain.y_max,
    };
    let name = if graded { "sinh-origin" } else { "uniform" };
    exact_study(
        format!("t3 {name} x-mesh"),
        manufactured_set_b(),
        domain,
        levels,
        Some(region),
    )
}

/// Vanilla call, `N × N × 2N` for `N = 8..256` against `512 × 512 × 1024`.
pub fn t4_study() -> StudyConfig {
    let problem = tp1();
    let region = strike_region(57.0, &problem.domain);
    StudyConfig {
        title: "t4 vanilla call self-convergence".into(),
        levels: [8, 16, 32, 64, 128, 256]
            .iter()
            .map(|&n| square(uniform(n), n, 2 * n))
            .collect(),
        target: StudyTarget::FineReference(square(uniform(512), 512, 1024)),
        region: Some(region),
        split: SourceSplit::default(),
        problem,
    }
}

/// Cash-or-nothing call, `N = 32..256`; `graded` uses sinh points around the
/// strike with `c = E/5`. The reference is a `512 × 512 × 1024` run of the
/// same mesh family.
pub fn t5_study(graded: bool) -> StudyConfig {
    let problem = tp2(1.0);
    let region = strike_region(57.0, &problem.domain);
    let x = if graded {
        AxisSpec::SinhStrike {
            n: 32,
            strike: 57.0,
            c: 57.0 / 5.0,
        }
    } else {
        uniform(32)
    };
    let name = if graded { "sinh-strike" } else { "uniform" };
    StudyConfig {
        title: format!("t5 cash-or-nothing, {name} x-mesh"),
        levels: [32, 64, 128, 256]
            .iter()
            .map(|&n| square(x, n, 2 * n))
            .collect(),
        target: StudyTarget::FineReference(square(x, 512, 1024)),
        region: Some(region),
        split: SourceSplit::default(),
        problem,
    }
}

/// Vanilla call with `ζ = 0`, `N = 8..128` against `256 × 256 × 512`.
pub fn t6_study() -> StudyConfig {
    let problem = tp1_with_zeta(0.0);
    let region = strike_region(57.0, &problem.domain);
    StudyConfig {
        title: "t6 vanilla call, zeta = 0".into(),
        levels: [8, 16, 32, 64, 128]
            .iter()
            .map(|&n| square(uniform(n), n, 2 * n))
            .collect(),
        target: StudyTarget::FineReference(square(uniform(256), 256, 512)),
        region: Some(region),
        split: SourceSplit::default(),
        problem,
    }
}

/// Every study that makes up a table.
pub fn studies(id: TableId) -> Vec<StudyConfig> {
    match id {
        TableId::T1 => vec![
            t1_study(manufactured_set_a()),
            t1_study(manufactured_set_b()),
        ],
        TableId::T2 => vec![
            t2_study(manufactured_set_a()),
            t2_study(manufactured_set_b()),
        ],
        TableId::T3 => vec![t3_study(true), t3_study(false)],
        TableId::T4 => vec![t4_study()],
        TableId::T5 => vec![t5_study(true), t5_study(false)],
        TableId::T6 => vec![t6_study()],
    }
}

pub fn run_table(id: TableId) -> Result<Vec<ConvergenceTable>> {
    studies(id).iter().map(run_convergence_study).collect()
}
