//! Spectral decomposition of colored 3D point clouds.
//!
//! A point cloud is mapped onto a dense voxel grid carrying R, G, B and a
//! binary occupancy channel, transformed with a 3D DFT, and split into
//! amplitude (which carries color/style attributes) and phase (which
//! carries geometric structure). Exchanging or blending these components
//! between clouds yields attribute swapping, style transfer and data
//! augmentation; an occupancy threshold removes the misalignment noise
//! introduced by modified spectra before points are reconstructed in
//! continuous space.

pub mod augment;
pub mod cloud;
pub mod error;
pub mod io;
pub mod spectral;
pub mod style;
pub mod transform;
pub mod verify;
pub mod voxel;

pub use augment::AugmentConfig;
pub use cloud::{Point, PointCloud};
pub use error::{Error, Result};
pub use spectral::{ChannelMode, ReconstructionParams};
pub use style::StyleImage;
pub use transform::{AmplitudePhase, Spectrum};
pub use voxel::{GridGeometry, VoxelGrid, VoxelSizePolicy};
