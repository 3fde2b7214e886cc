//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::voxel::GridGeometry;

/// Errors produced by point-cloud, transform and I/O operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("voxel size must be positive, got {0}")]
    NonPositiveVoxelSize(f64),

    #[error("point cloud must contain at least one point")]
    EmptyCloud,

    #[error("invalid point at index {index}: {reason}")]
    InvalidPoint { index: usize, reason: String },

    #[error(
        "point {index} at ({x}, {y}, {z}) lies outside the grid bounds \
         [{x_min}, {x_max}] x [{y_min}, {y_max}] x [{z_min}, {z_max}]"
    )]
    PointOutOfBounds {
        index: usize,
        x: f64,
        y: f64,
        z: f64,
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        z_min: f64,
        z_max: f64,
    },

    #[error("grid shapes do not match: left is {left}, right is {right}")]
    GeometryMismatch { left: Box<GridGeometry>, right: Box<GridGeometry> },

    #[error("array length {actual} does not match grid of {expected} elements")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("interpolation weight must lie in [0, 1], got {0}")]
    GammaOutOfRange(f64),

    #[error("pi threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),

    #[error("amplitude must be non-negative and finite, found {value} at index {index}")]
    InvalidAmplitude { index: usize, value: f64 },

    #[error(
        "reconstruction produced no points: {occupied} voxels above threshold \
         (maximum occupancy value observed: {max_pi})"
    )]
    EmptyReconstruction { occupied: usize, max_pi: f64 },

    #[error("dataset augmentation needs at least 2 clouds, got {0}")]
    DatasetTooSmall(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}: missing vertex property '{property}'")]
    MissingProperty { path: PathBuf, property: String },

    #[error("{path}: {message}")]
    UnsupportedFormat { path: PathBuf, message: String },

    #[error("{path}: truncated payload, expected {expected} bytes but found {actual}")]
    Truncated { path: PathBuf, expected: u64, actual: u64 },

    #[error(
        "{path}: spectrum was written with normalization convention {found}, \
         this build reads convention {expected}"
    )]
    ConventionMismatch { path: PathBuf, found: u8, expected: u8 },

    #[error("dataset directory {path} yielded no readable point clouds")]
    EmptyDataset { path: PathBuf },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::UnsupportedFormat { path: path.into(), message: message.into() }
    }
}
