//! Dataset ingestion: one subdirectory per class label, point cloud files
//! inside. Every loaded cloud is normalized so its widest axis spans
//! `[-1, 1]` about the centroid.

use std::path::{Path, PathBuf};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::io::read_pointcloud;

/// A point cloud together with its class label and source path.
#[derive(Debug, Clone)]
pub struct LabeledCloud {
    pub label: String,
    pub path: PathBuf,
    pub cloud: PointCloud,
}

/// Result of walking a dataset directory.
#[derive(Debug)]
pub struct Dataset {
    pub clouds: Vec<LabeledCloud>,
    /// Files that could not be read, with the reason; non-fatal as long
    /// as at least one cloud loads.
    pub skipped: Vec<(PathBuf, String)>,
}

/// Loads every `.ply`/`.csv` file under `dir/<label>/`, normalizing each
/// cloud to `[-1, 1]`. Traversal order is lexicographic, so a directory
/// always ingests in the same order.
pub fn ingest_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let mut class_dirs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();

    let mut clouds = Vec::new();
    let mut skipped = Vec::new();
    for class_dir in class_dirs {
        let label = class_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = match std::fs::read_dir(&class_dir) {
            Ok(entries) => entries
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("ply") | Some("csv")
                    )
                })
                .collect(),
            Err(e) => {
                skipped.push((class_dir.clone(), e.to_string()));
                continue;
            }
        };
        files.sort();
        for path in files {
            match read_pointcloud(&path) {
                Ok(cloud) => clouds.push(LabeledCloud {
                    label: label.clone(),
                    path,
                    cloud: cloud.normalized_to_unit(),
                }),
                Err(e) => skipped.push((path, e.to_string())),
            }
        }
    }

    if clouds.is_empty() {
        return Err(Error::EmptyDataset { path: dir.to_path_buf() });
    }
    Ok(Dataset { clouds, skipped })
}
