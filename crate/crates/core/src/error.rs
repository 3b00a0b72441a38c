use thiserror::Error;

use crate::energy::EnergyProfile;
use crate::spheremax::LevelMaxResult;

/// Which mountain-pass geometry witness could not be produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryWitness {
    /// No level with energy strictly above `J(0)` on the scanned small radii.
    SmallLevel,
    /// No level below the small-radius energy before the growth cap.
    FarLevel,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match the grid ({expected} interior nodes)")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for a {dims}-axis grid")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("exponent must exceed 1, got {0}")]
    InvalidExponent(f64),

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:.3e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not bracket the level {r} along the given direction")]
    LevelBracket { r: f64 },

    #[error("no start reached stationarity at r = {} (best stationarity {:.3e})", .best.r, .best.stationarity)]
    MaximizerFailed { best: Box<LevelMaxResult> },

    #[error("profile scan failed at r = {r}: {source}")]
    ScanFailed {
        r: f64,
        partial: Box<EnergyProfile>,
        #[source]
        source: Box<Error>,
    },

    #[error("no interior critical point of the energy function on the scanned range")]
    NoBracket,

    #[error("the energy function peaks at a corner near r = {r} ({corners} corner(s) met) and no smooth critical point was resolved")]
    CornerOnly { r: f64, corners: usize },

    #[error("mountain-pass geometry not witnessed: {detail}")]
    Geometry { witness: GeometryWitness, detail: String },

    #[error("no sign change of J'(tu)tu along the direction on the scanned range")]
    NoNehariRoot,

    #[error("every sampled direction failed to meet the Nehari set")]
    NehariEmpty,

    #[error("eigen iteration stopped after {iterations} iterations (residual {residual:.3e})")]
    EigenNotConverged { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
