use thiserror::Error;

use crate::atlas::ChartId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("derivative of order {requested} unavailable (supported up to {available})")]
    OrderUnavailable { requested: usize, available: usize },

    #[error("point lies outside the overlap of charts {from} and {to}")]
    OutsideOverlap { from: ChartId, to: ChartId },

    #[error("charts {0} and {1} do not overlap")]
    NoOverlap(ChartId, ChartId),

    #[error("fixture has no overlapping chart pair")]
    NoOverlapAvailable,

    #[error("unknown chart {0}")]
    UnknownChart(ChartId),

    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(ChartId, ChartId),

    #[error("jets do not share a base point")]
    BasePointMismatch,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("metric is singular at the requested point")]
    SingularMetric,

    #[error("fibre Hessian of the Lagrangian is singular")]
    DegenerateLagrangian,

    #[error("coefficient supplier exhausted at order {requested} (materialized {available})")]
    SupplierExhausted { requested: usize, available: usize },

    #[error("evaluator rejected input: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
