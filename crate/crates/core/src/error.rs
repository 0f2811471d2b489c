use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. Each variant maps to a distinct
/// machine-readable code in the CLI front end.
#[derive(Error, Debug)]
pub enum Error {
    #[error("unsupported torus dimension {0}: supported dimensions are 1..=4")]
    UnsupportedDimension(usize),

    #[error("eigenfunction label `{label}` does not belong to manifold `{manifold}`")]
    LabelMismatch { manifold: String, label: String },

    #[error("invalid point for `{manifold}`: {reason}")]
    InvalidPoint { manifold: String, reason: String },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("Bessel order {0} outside the supported range [-1, 6]")]
    OrderOutOfRange(f64),

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("oscillatory-series acceleration failed the Cauchy test after {half_periods} half-periods")]
    AccelerationDivergence { half_periods: usize },

    #[error("kernel normalization failed: computed norm {norm} deviates from 1")]
    NormalizationFailure { norm: f64 },

    #[error("lattice enumeration bound exceeded: lambda_X/2pi = {requested} > {max}")]
    LatticeBoundExceeded { requested: f64, max: f64 },

    #[error("point {index} lies outside every partition region")]
    PointOutsideRegions { index: usize },

    #[error("quadrature rule violates the weight-sum condition: residual at m=0 is {residual}")]
    WeightSumViolation { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown manifold name `{0}`")]
    UnknownManifold(String),

    #[error("unknown point family `{0}`")]
    UnknownFamily(String),

    #[error("{path}:{line}: malformed point-set file: {msg}")]
    PointSetFormat {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
