use thiserror::Error;

/// Errors raised by the numerical and geometric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {point:?} lies outside the natural-parameter domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("{value} is not a point of the sample space")]
    NotInSupport { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("quadrature did not converge: order {order} gives {low:e}, order {doubled} gives {high:e}")]
    Quadrature {
        order: usize,
        doubled: usize,
        low: f64,
        high: f64,
    },

    #[error("point is {distance:e} from the domain boundary, finite differences need {required:e}")]
    BoundaryProximity { distance: f64, required: f64 },

    #[error("random variable is not in span{{1, F_1, .., F_n}} (least-squares residual {residual:e})")]
    NotKahler { residual: f64 },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not skew-Hermitian (deviation {0:e})")]
    NotSkewHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("{0} is not an eigenvalue of the observable")]
    NotAnEigenvalue(f64),

    #[error("state is orthogonal to the eigenspace; nearest-point projection is undefined")]
    UndefinedProjection,

    #[error("Kähler function with a quadratic term has no statistical decomposition")]
    NotDecomposable,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("family spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
