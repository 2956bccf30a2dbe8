use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate look-at: up vector is parallel to the viewing direction")]
    DegenerateLookAt,

    #[error("degenerate scene: {0}")]
    DegenerateScene(String),

    #[error("scene not visible: no camera ray hits any primitive")]
    SceneNotVisible,

    #[error("radiance field evaluated to a non-finite value at t = {t}")]
    NonFiniteField { t: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("point is behind the camera (z = {z})")]
    BehindCamera { z: f64 },

    #[error("insufficient views: requested {requested} neighbours but only {available} other views exist")]
    InsufficientViews { requested: usize, available: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("no valid pixels to evaluate")]
    NoValidPixels,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("view {0} has no depth map")]
    MissingDepth(usize),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("corrupt depth file {path}: {reason}")]
    CorruptDepth { path: PathBuf, reason: String },

    #[error("corrupt image file {path}: {reason}")]
    CorruptImage { path: PathBuf, reason: String },

    #[error("schema mismatch: found version {found}, expected {expected}")]
    SchemaMismatch { found: u32, expected: u32 },

    #[error("inconsistent manifest: {0}")]
    InconsistentManifest(String),

    #[error("frames use different intrinsics; transforms export needs a shared camera")]
    MixedIntrinsics,

    #[error("json error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
