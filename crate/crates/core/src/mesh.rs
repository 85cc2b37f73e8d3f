//! Primal/dual axes and tensor-product grids.
//!
//! Dual faces sit at midpoints `x_{i+1/2} = ½(x_i + x_{i+1})`; the outermost
//! faces coincide with the end nodes, so the first and last control volumes
//! are half cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the nodes of an axis are placed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisSpec {
    Uniform {
        n: usize,
    },
    /// `x_i = lo + d·sinh(i·Δη)`, clustered at `lo`.
    SinhOrigin {
        n: usize,
        d: f64,
    },
    /// `x_i = lo + E + c·sinh(η_i)`, clustered at `lo + E`.
    SinhStrike {
        n: usize,
        strike: f64,
        c: f64,
    },
}

impl AxisSpec {
    pub fn intervals(&self) -> usize {
        match *self {
            AxisSpec::Uniform { n }
            | AxisSpec::SinhOrigin { n, .. }
            | AxisSpec::SinhStrike { n, .. } => n,
        }
    }

    /// Same family with a different interval count.
    pub fn with_intervals(&self, n: usize) -> AxisSpec {
        match *self {
            AxisSpec::Uniform { .. } => AxisSpec::Uniform { n },
            AxisSpec::SinhOrigin { d, .. } => AxisSpec::SinhOrigin { n, d },
            AxisSpec::SinhStrike { strike, c, .. } => AxisSpec::SinhStrike { n, strike, c },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    nodes: Vec<f64>,
    /// `faces[0] = x_0`, `faces[i + 1] = x_{i+1/2}`, `faces[N + 1] = x_N`.
    faces: Vec<f64>,
    primal: Vec<f64>,
    dual: Vec<f64>,
}

impl Axis {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "an axis needs at least 2 intervals, got {}",
                nodes.len().saturating_sub(1)
            )));
        }
        if nodes.iter().any(|v| !v.is_finite()) || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Internal(
                "axis nodes are not strictly increasing".into(),
            ));
        }
        let n = nodes.len() - 1;
        let mut faces = Vec::with_capacity(n + 2);
        faces.push(nodes[0]);
        faces.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        faces.push(nodes[n]);
        let primal = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let dual = faces.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            nodes,
            faces,
            primal,
            dual,
        })
    }

    /// Number of intervals `N`; there are `N + 1` nodes.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// `x_{i-1/2}`.
    pub fn face_below(&self, i: usize) -> f64 {
        self.faces[i]
    }

    /// `x_{i+1/2}`.
    pub fn face_above(&self, i: usize) -> f64 {
        self.faces[i + 1]
    }

    /// All `N + 2` face coordinates.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// `h_i = x_{i+1} - x_i`, length `N`.
    pub fn primal_widths(&self) -> &[f64] {
        &self.primal
    }

    /// `ħ_i = x_{i+1/2} - x_{i-1/2}`, length `N + 1`.
    pub fn dual_widths(&self) -> &[f64] {
        &self.dual
    }

    /// Index of the interval containing `x`, clamped to the axis.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.intervals();
        self.nodes
            .partition_point(|&v| v <= x)
            .saturating_sub(1)
            .min(n - 1)
    }
}

pub fn build_axis(spec: &AxisSpec, lo: f64, hi: f64) -> Result<Axis> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "axis bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let n = spec.intervals();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "an axis needs N >= 2 intervals, got {n}"
        )));
    }
    let len = hi - lo;
    let mut nodes: Vec<f64> = match *spec {
        AxisSpec::Uniform { .. } => (0..=n).map(|i| lo + len * i as f64 / n as f64).collect(),
        AxisSpec::SinhOrigin { d, .. } => {
            if !(d > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sinh scale d must be positive, got {d}"
                )));
            }
            let step = (len / d).asinh() / n as f64;
            (0..=n).map(|i| lo + d * (i as f64 * step).sinh()).collect()
        }
        AxisSpec::SinhStrike { strike, c, .. } => {
            if !(strike > 0.0 && strike < len) {
                return Err(Error::InvalidParameter(format!(
                    "strike offset must lie in (0, {len}), got {strike}"
                )));
            }
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sinh scale c must be positive, got {c}"
                )));
            }
            let eta0 = (-strike / c).asinh();
            let step = (((len - strike) / c).asinh() - eta0) / n as f64;
            (0..=n)
                .map(|i| lo + strike + c * (eta0 + i as f64 * step).sinh())
                .collect()
        }
    };
    nodes[0] = lo;
    nodes[n] = hi;
    Axis::from_nodes(nodes)
}

/// Tensor mesh on `[0, X] x [ζ, Y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x: Axis,
    pub y: Axis,
}

impl Grid2D {
    pub fn new(x: Axis, y: Axis) -> Self {
        Self { x, y }
    }

    pub fn build(
        x_spec: &AxisSpec,
        y_spec: &AxisSpec,
        domain: &crate::model::DomainBox,
    ) -> Result<Self> {
        Ok(Self {
            x: build_axis(x_spec, 0.0, domain.x_max)?,
            y: build_axis(y_spec, domain.zeta, domain.y_max)?,
        })
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }
}

/// CSV dump: `index,node,midpoint,primal_width,dual_width`. The midpoint column
/// holds `x_{i+1/2}` and the primal width `h_i`; both are empty on the last row.
pub fn axis_csv(axis: &Axis) -> String {
    let mut out = String::from("index,node,midpoint,primal_width,dual_width\n");
    let n = axis.intervals();
    for i in 0..=n {
        let (mid, h) = if i < n {
            (
                crate::csvfmt::num(axis.face_above(i)),
                crate::csvfmt::num(axis.primal_widths()[i]),
            )
        } else {
            (String::new(), String::new())
        };
        out.push_str(&format!(
            "{i},{},{mid},{h},{}\n",
            crate::csvfmt::num(axis.nodes()[i]),
            crate::csvfmt::num(axis.dual_widths()[i])
        ));
    }
    out
}
