use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("interior flux weights need 0 < x_lo < x_hi, got [{x_lo}, {x_hi}]; use origin weights at zero")]
    FluxInterval { x_lo: f64, x_hi: f64 },

    #[error("{sweep} sweep failed at {index_name} {index}: {source}")]
    Sweep {
        sweep: &'static str,
        index_name: &'static str,
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite value in field after time step {step}")]
    NonFinite { step: usize },

    #[error("empty region: no mesh nodes inside [{x0}, {x1}] x [{y0}, {y1}]")]
    EmptyRegion { x0: f64, x1: f64, y0: f64, y1: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
