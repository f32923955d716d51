use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sheet spec: {0}")]
    InvalidSpec(String),

    #[error("displacement {delta_x} mm is outside [0, max_displacement = {max_displacement}] mm")]
    DisplacementOutOfRange { delta_x: f64, max_displacement: f64 },

    #[error("station x = {x} mm is outside the deformed boundary [0, {lx}] mm")]
    StationOutOfRange { x: f64, lx: f64 },

    #[error("invalid ribbon: rest length {rest_length} mm, endpoint distance {dy} mm")]
    InvalidRibbon { rest_length: f64, dy: f64 },

    #[error("ribbon is flat (not buckled); no catenary profile exists")]
    FlatRibbon,

    #[error("link angle {theta} rad is degenerate; force diverges as the linkage flattens")]
    DegenerateAngle { theta: f64 },

    #[error("insufficient data: need at least {needed} force rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("singular design: regressors are collinear or zero")]
    SingularDesign,

    #[error("missing column: {0}")]
    MissingColumn(&'static str),

    #[error("invalid measurements: {0}")]
    InvalidMeasurements(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error("invalid grasp requirement: {0}")]
    InvalidRequirement(String),

    #[error("unknown constants: {0}")]
    UnknownConstants(String),

    #[error("empty design grid")]
    EmptyGrid,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numeric,
    Io,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::FlatRibbon | Error::DegenerateAngle { .. } | Error::SingularDesign => {
                ErrorClass::Numeric
            }
            Error::Io { .. } => ErrorClass::Io,
            _ => ErrorClass::Input,
        }
    }
}
