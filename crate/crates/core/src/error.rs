use std::path::PathBuf;

use crate::mask::AnatomyClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ellipse fit needs at least 6 points, got {got}")]
    InsufficientPoints { got: usize },

    #[error("degenerate point configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("ruler not found: {found} marker(s) accepted, need at least 3")]
    RulerNotFound { found: usize },

    #[error("ruler marker gaps are inconsistent (coefficient of variation {cv:.3})")]
    InconsistentSpacing { cv: f64 },

    #[error("mask contains no anatomy")]
    NoAnatomy,

    #[error("class {0} has zero pixels, weight undefined")]
    DegenerateClass(AnatomyClass),

    #[error("shape mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    ShapeMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("{subjects} subject(s) cannot fill {k} folds")]
    TooFewSubjects { subjects: usize, k: usize },

    #[error("phantom shape does not fit inside the image with the required margin")]
    SpecOutOfBounds,

    #[error("ruler ticks {spacing_px:.2} px apart are not resolvable (need >= 8 px)")]
    UnresolvableTicks { spacing_px: f64 },

    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    #[error("illegal label value {value} at ({x}, {y})")]
    IllegalLabelValue { x: usize, y: usize, value: u8 },

    #[error("no input files found in {0}")]
    NoInputs(PathBuf),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code, used for per-image failure records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::RulerNotFound { .. } => "RulerNotFound",
            Error::InconsistentSpacing { .. } => "InconsistentSpacing",
            Error::NoAnatomy => "NoAnatomy",
            Error::DegenerateClass(_) => "DegenerateClass",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::TooFewSubjects { .. } => "TooFewSubjects",
            Error::SpecOutOfBounds => "SpecOutOfBounds",
            Error::UnresolvableTicks { .. } => "UnresolvableTicks",
            Error::UnreadableFile { .. } => "UnreadableFile",
            Error::IllegalLabelValue { .. } => "IllegalLabelValue",
            Error::NoInputs(_) => "NoInputs",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
