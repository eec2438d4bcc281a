use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial degree must be at least 1")]
    ZeroDegree,
    #[error("quadrature with {points} points cannot integrate the degree-{degree} mass matrix exactly")]
    QuadratureTooLow { degree: usize, points: usize },
    #[error("derivative order {order} exceeds polynomial degree {degree}")]
    DerivativeOrder { order: usize, degree: usize },
    #[error("cell size must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("unsupported spatial dimension {0} (expected 2 or 3)")]
    Dimension(usize),
    #[error("extent mismatch: expected {expected}, found {found}")]
    ExtentMismatch { expected: usize, found: usize },
    #[error("axis {axis} out of range for a {dim}-dimensional field")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("vector length {found} does not match {expected} active degrees of freedom")]
    SizeMismatch { expected: usize, found: usize },
    #[error("ghost face at cell {cell} (axis {axis}) touches a cell outside the domain")]
    FaceOutsideDomain { cell: usize, axis: usize },
    #[error("cell {0} lies outside the domain")]
    CellOutsideDomain(usize),
    #[error("cell {0} is not a cut cell or has no cached quadrature")]
    MissingQuadrature(usize),
    #[error("root finding failed in cell {cell}")]
    RootFinding { cell: usize },
    #[error("invalid ball description on line {line}: {reason}")]
    BallFormat { line: usize, reason: String },
    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {relative_residual:e})")]
    NotConverged { iterations: usize, relative_residual: f64, history: Vec<f64> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
