use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the geometry kernel can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a pure dual number (real part {real:e} below tolerance)")]
    PureDualDivision { real: f64 },

    #[error("{function} is undefined at {argument}")]
    Domain {
        function: &'static str,
        argument: f64,
    },

    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("dual vector has a vanishing real part (norm {norm:e})")]
    PureDualVector { norm: f64 },

    #[error("dual vector is not a unit line: {reason}")]
    NotAUnitLine { reason: String },

    #[error("line direction has zero length")]
    ZeroDirection,

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("director is stationary (|e'| = {speed:e}) at u = {u}")]
    CylindricalDirector { u: f64, speed: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("parameter {value} outside domain [{min}, {max}]")]
    OutOfDomain { value: f64, min: f64, max: f64 },

    #[error("degenerate offset: cos(theta) + gamma sin(theta) = {value:e} at s = {s}")]
    DegenerateOffset { s: f64, value: f64 },

    #[error("no developable offset distance exists: sin(theta) - gamma cos(theta) = {value:e}")]
    NoSolution { value: f64 },

    #[error("base surface is not developable (|Delta| = {delta:e})")]
    NotDevelopableBase { delta: f64 },

    #[error("invalid offset angle {theta} (must lie in [0, pi])")]
    InvalidOffsetAngle { theta: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}
