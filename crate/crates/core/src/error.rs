use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("empty range for {field}: min {min} > max {max}")]
    EmptyRanges {
        field: &'static str,
        min: f64,
        max: f64,
    },

    #[error("{field} = {value} is outside its allowed bounds {bounds}")]
    OutOfBounds {
        field: &'static str,
        value: f64,
        bounds: &'static str,
    },

    #[error("no region fits a {width}x{height} image: {reason}")]
    Infeasible {
        width: usize,
        height: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("region {region} does not fit a {width}x{height} image")]
    RegionOutOfBounds {
        region: String,
        width: usize,
        height: usize,
    },

    #[error("region sampling exhausted after {attempts} placement attempts over {shapes} shapes")]
    SamplingExhausted { attempts: u64, shapes: u32 },

    #[error("expected a {expected}-channel image, got {actual} channels")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("style model not found: {}", .0.display())]
    ModelNotFound(PathBuf),

    #[error("cannot parse style model {}: {message}", .path.display())]
    ModelParse { path: PathBuf, message: String },

    #[error("style model shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("style model inference failed: {0}")]
    Inference(String),

    #[error("truncated file {}: {len} bytes is not a multiple of {record} bytes", .path.display())]
    TruncatedFile {
        path: PathBuf,
        len: u64,
        record: u64,
    },

    #[error("label file has {labels} entries but image file has {images} images")]
    LabelCountMismatch { images: usize, labels: usize },

    #[error("label {value} at index {index} is outside 1..=10")]
    LabelOutOfRange { index: usize, value: u32 },

    #[error("item {0} has no label but a label file was requested")]
    MissingLabel(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("mixed dimensions: {first} vs {other} ({source_id})")]
    MixedDimensions {
        first: String,
        other: String,
        source_id: String,
    },

    #[error("duplicate source id {0}")]
    DuplicateId(String),

    #[error("manifest line {line}: {message}")]
    ManifestParse { line: usize, message: String },

    #[error("item {source_id}: {source}")]
    Item {
        source_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by the caller's configuration rather than by
    /// data or the filesystem.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::EmptyRanges { .. } | Error::OutOfBounds { .. } | Error::Infeasible { .. } => {
                true
            }
            Error::Item { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
