use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gray level {0} is outside 0..=255")]
    InvalidGrayLevel(i64),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("font has no glyph for {0:?}")]
    MissingGlyph(char),

    #[error("word {0:?} renders to no ink")]
    ZeroArea(String),

    #[error("region at ({x}, {y}) of size {width}x{height} does not fit in a {image_width}x{image_height} image")]
    OutOfBounds {
        x: u32,
        y: u32,
        width: u32,
        height: u32,
        image_width: u32,
        image_height: u32,
    },

    #[error("a {mask_width}x{mask_height} word does not fit in a {image_width}x{image_height} background")]
    NoFit {
        mask_width: u32,
        mask_height: u32,
        image_width: u32,
        image_height: u32,
    },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("no usable fonts found under {0}")]
    EmptyLibrary(PathBuf),

    #[error("no usable background images found under {0}")]
    EmptyPool(PathBuf),

    #[error("word corpus {0} has no entries")]
    EmptyCorpus(PathBuf),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("could not parse font {path}: {message}")]
    Font { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
