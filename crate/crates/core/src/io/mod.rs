//! File formats: PLY and CSV point clouds, PNG/PPM style images, the
//! binary spectrum container, and dataset directory ingestion.
//!
//! All writers are deterministic: the same input produces a byte-identical
//! file.

mod csv;
mod dataset;
mod image;
mod ply;
mod spectrum;

use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

pub use dataset::{ingest_dataset, Dataset, LabeledCloud};
pub use image::read_image;
pub use spectrum::{read_spectrum, write_spectrum, NORMALIZATION_UNNORMALIZED_FORWARD};

/// Reads a point cloud, inferring the format from the file extension
/// (`.ply` or `.csv`).
pub fn read_pointcloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    match extension(path) {
        Some("ply") => ply::read(path),
        Some("csv") => csv::read(path),
        _ => Err(Error::format(path, "unsupported point cloud extension (expected .ply or .csv)")),
    }
}

/// Writes a point cloud, inferring the format from the file extension.
/// Colors are quantized to 8 bits and coordinates to 32-bit floats.
pub fn write_pointcloud(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match extension(path) {
        Some("ply") => ply::write(cloud, path),
        Some("csv") => csv::write(cloud, path),
        _ => Err(Error::format(path, "unsupported point cloud extension (expected .ply or .csv)")),
    }
}

fn extension(path: &Path) -> Option<&str> {
    path.extension().and_then(|e| e.to_str())
}

/// `[0, 1]` color to the 8-bit scale used on disk.
pub(crate) fn color_to_u8(c: f64) -> u8 {
    (c * 255.0).round().clamp(0.0, 255.0) as u8
}

/// 8-bit color scale back to `[0, 1]`.
pub(crate) fn color_from_u8(c: u8) -> f64 {
    c as f64 / 255.0
}
