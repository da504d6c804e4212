use thiserror::Error;

/// Errors raised by the operators, weights, fields and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("unsupported spatial dimension {0} (direct sphere quadrature supports 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("non-integrable singularity: exponent {exponent} <= -{n}")]
    NonIntegrable { exponent: f64, n: usize },

    #[error("unbounded weight support without a tail certificate")]
    MissingTailCertificate,

    #[error("weight has zero or non-finite mass ({0})")]
    DegenerateMass(f64),

    #[error("quadrature did not reach tolerance: estimate {value}, error {error}")]
    Quadrature { value: f64, error: f64 },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("ball of radius {radius} around {center} leaves the window [{a}, {b}]")]
    BallOutsideWindow { center: f64, radius: f64, a: f64, b: f64 },

    #[error("atom at {location:?} lies on the sphere of radius {radius} around {center:?}")]
    AtomOnSphere {
        location: Vec<f64>,
        center: Vec<f64>,
        radius: f64,
    },

    #[error("evaluation point {0} coincides with a jump")]
    AtJump(f64),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
