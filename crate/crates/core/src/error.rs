use thiserror::Error;

use crate::ChartPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet division by a series with vanishing constant term ({0:e})")]
    DivisionByZeroJet(f64),
    #[error("square root of a jet with non-positive constant term ({0:e})")]
    NegativeSqrtJet(f64),
    #[error("logarithm or fractional power of a jet with non-positive constant term ({0:e})")]
    NonPositiveJet(f64),
    #[error("jet order exhausted: cannot differentiate an order-0 jet")]
    OrderExhausted,
    #[error("requested jet order {requested} exceeds the supported maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error("point {0} lies inside a pole cap of the sphere chart")]
    PoleProximity(ChartPoint),
    #[error("point {0} is a singular point of the parametrization")]
    SingularBasePoint(ChartPoint),
    #[error("surface is not strictly convex at {point} (K = {curvature:e})")]
    NotConvex { point: ChartPoint, curvature: f64 },
    #[error("affine normal is tangential at {0}")]
    TangentialAffineNormal(ChartPoint),
    #[error("point {0} is not a singular point of the homomorphism")]
    NotSingular(ChartPoint),
    #[error("both adjugate columns vanish at {0} (corank two)")]
    ZeroAdjugate(ChartPoint),
    #[error("grid resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("homomorphism is not Morin: {0}")]
    NotMorin(String),
    #[error("degenerate A3 candidate at {point}: {reason}")]
    DegenerateA3 { point: ChartPoint, reason: String },
    #[error("degree quadrature is not integral: raw = {raw}, residual = {residual:e}")]
    NonIntegerDegree { raw: f64, residual: f64 },
    #[error("degree quadrature gives {quadrature} but the signed preimage count is {preimages}")]
    DegreeMismatch { quadrature: i64, preimages: i64 },
    #[error("vector field zero at {0} is not generic (singular Jacobian)")]
    NonGenericZero(ChartPoint),
    #[error("Euler characteristic cross-check failed: {0}")]
    EulerMismatch(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("value out of range for `{key}`: {message}")]
    Range { key: String, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
