use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Numeric payloads are stored as `f64` so the type is independent of the
/// scalar a computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius {r} outside profile domain [{min}, {max}]")]
    OutsideDomain { r: f64, min: f64, max: f64 },

    #[error("point ({x}, {y}) is not strictly inside the disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("radius {r} is within {margin:e} of the piecewise joint at {joint}; evaluate one-sided instead")]
    AtJoint { r: f64, joint: f64, margin: f64 },

    #[error("Green function is singular at x = y")]
    Singular,

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error {error:e}")]
    Tolerance { estimate: f64, error: f64, tol: f64 },

    #[error("solution blew up (u > {cutoff}) beyond radius {radius}")]
    BlowUp { radius: f64, cutoff: f64 },

    #[error("no shooting bracket found for boundary value {g} in u0 ∈ [{lo}, {hi}]")]
    NoSolution { g: f64, lo: f64, hi: f64 },

    #[error("singular linear system at row {row}")]
    SingularSystem { row: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("region does not intersect the field geometry: {0}")]
    EmptyRegion(String),

    #[error("inconsistent input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
