use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },

    #[error("point ({}, {}) lies outside the closed unit square", point[0], point[1])]
    PointOutsideDomain { point: [f64; 2] },

    #[error("point ({}, {}) must lie strictly inside the unit square", point[0], point[1])]
    PointOnBoundary { point: [f64; 2] },

    #[error("level order violated: coarse level {coarse} is finer than level {fine}")]
    LevelOrder { coarse: u32, fine: u32 },

    #[error("mesh mismatch: expected level {expected}, found level {found}")]
    MeshMismatch { expected: u32, found: u32 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "linear solver did not converge after {iterations} iterations (residual {residual:e})"
    )]
    SolverFailure { iterations: usize, residual: f64 },

    #[error(
        "degenerate reference-point geometry: current objectives coincide with the reference point"
    )]
    DegenerateGeometry,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
