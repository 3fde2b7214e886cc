//! Voxelization: mapping continuous point clouds onto dense 4-channel
//! grids (R, G, B plus a binary occupancy channel) and back.

use std::fmt;

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};

/// Number of grid channels: R, G, B and the occupancy channel.
pub const CHANNELS: usize = 4;
/// Index of the red channel.
pub const CH_R: usize = 0;
/// Index of the green channel.
pub const CH_G: usize = 1;
/// Index of the blue channel.
pub const CH_B: usize = 2;
/// Index of the occupancy channel.
pub const CH_PI: usize = 3;

/// Axis-aligned grid extent plus resolution.
///
/// Dimensions follow `W = max(1, ceil((x_max - x_min) / v))` per axis, so
/// a degenerate (zero-extent) axis still yields one voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    mins: [f64; 3],
    maxs: [f64; 3],
    voxel_size: f64,
    dims: [usize; 3],
}

impl GridGeometry {
    /// Builds a geometry from explicit bounds and a voxel size.
    pub fn from_bounds(mins: [f64; 3], maxs: [f64; 3], voxel_size: f64) -> Result<Self> {
        if voxel_size <= 0.0 || !voxel_size.is_finite() {
            return Err(Error::NonPositiveVoxelSize(voxel_size));
        }
        for axis in 0..3 {
            if !mins[axis].is_finite() || !maxs[axis].is_finite() || maxs[axis] < mins[axis] {
                return Err(Error::InvalidPoint {
                    index: axis,
                    reason: format!(
                        "invalid bounds on axis {axis}: [{}, {}]",
                        mins[axis], maxs[axis]
                    ),
                });
            }
        }
        let mut dims = [1usize; 3];
        for axis in 0..3 {
            let cells = ((maxs[axis] - mins[axis]) / voxel_size).ceil() as usize;
            dims[axis] = cells.max(1);
        }
        Ok(GridGeometry { mins, maxs, voxel_size, dims })
    }

    pub fn mins(&self) -> [f64; 3] {
        self.mins
    }

    pub fn maxs(&self) -> [f64; 3] {
        self.maxs
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn width(&self) -> usize {
        self.dims[0]
    }

    pub fn height(&self) -> usize {
        self.dims[1]
    }

    pub fn depth(&self) -> usize {
        self.dims[2]
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Voxels per channel.
    pub fn voxel_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// True when both geometries have identical W, H, D.
    pub fn same_shape(&self, other: &GridGeometry) -> bool {
        self.dims == other.dims
    }

    pub fn contains(&self, p: &Point) -> bool {
        let pos = p.position();
        (0..3).all(|axis| pos[axis] >= self.mins[axis] && pos[axis] <= self.maxs[axis])
    }

    /// Voxel index of a point, clamped so points exactly on the max
    /// boundary land in the last voxel.
    pub fn voxel_index(&self, p: &Point) -> [usize; 3] {
        let pos = p.position();
        let mut idx = [0usize; 3];
        for axis in 0..3 {
            let i = ((pos[axis] - self.mins[axis]) / self.voxel_size).floor() as usize;
            idx[axis] = i.min(self.dims[axis] - 1);
        }
        idx
    }

    /// Continuous-space center of voxel `(x, y, z)`.
    pub fn voxel_center(&self, x: usize, y: usize, z: usize) -> [f64; 3] {
        [
            self.mins[0] + (x as f64 + 0.5) * self.voxel_size,
            self.mins[1] + (y as f64 + 0.5) * self.voxel_size,
            self.mins[2] + (z as f64 + 0.5) * self.voxel_size,
        ]
    }

    /// Checks the dimension formula against the stored bounds; used when
    /// geometry records arrive from external files.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = GridGeometry::from_bounds(self.mins, self.maxs, self.voxel_size)?;
        if rebuilt.dims != self.dims {
            return Err(Error::ShapeMismatch {
                expected: rebuilt.voxel_count(),
                actual: self.voxel_count(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GridGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{} (v={})", self.dims[0], self.dims[1], self.dims[2], self.voxel_size)
    }
}

/// How the voxel size is chosen when the caller does not fix it directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoxelSizePolicy {
    /// Use this voxel edge length as-is.
    Fixed(f64),
    /// Pick the voxel size so the largest grid dimension equals the given
    /// cap.
    GridMax(u32),
}

impl Default for VoxelSizePolicy {
    fn default() -> Self {
        VoxelSizePolicy::GridMax(64)
    }
}

impl VoxelSizePolicy {
    /// Resolves the policy against concrete bounds.
    pub fn resolve(&self, mins: [f64; 3], maxs: [f64; 3]) -> Result<f64> {
        match *self {
            VoxelSizePolicy::Fixed(v) => {
                if v <= 0.0 || !v.is_finite() {
                    Err(Error::NonPositiveVoxelSize(v))
                } else {
                    Ok(v)
                }
            }
            VoxelSizePolicy::GridMax(cap) => {
                if cap == 0 {
                    return Err(Error::NonPositiveVoxelSize(0.0));
                }
                let extent = (0..3).map(|a| maxs[a] - mins[a]).fold(0.0f64, f64::max);
                if extent <= 0.0 {
                    // Degenerate cloud: a single voxel of unit size.
                    return Ok(1.0);
                }
                // Nudge up so extent / v stays strictly below the cap and
                // the ceiling in the dimension formula cannot overshoot.
                Ok(extent / cap as f64 * (1.0 + 1e-12))
            }
        }
    }
}

/// Dense W x H x D x 4 grid. Channel-major storage, x fastest:
/// `data[((c * D + z) * H + y) * W + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    geometry: GridGeometry,
    data: Vec<f64>,
}

impl VoxelGrid {
    pub fn zeros(geometry: GridGeometry) -> Self {
        let len = CHANNELS * geometry.voxel_count();
        VoxelGrid { geometry, data: vec![0.0; len] }
    }

    /// Wraps raw channel-major data, checking the length.
    pub fn from_parts(geometry: GridGeometry, data: Vec<f64>) -> Result<Self> {
        let expected = CHANNELS * geometry.voxel_count();
        if data.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: data.len() });
        }
        Ok(VoxelGrid { geometry, data })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn index(&self, channel: usize, x: usize, y: usize, z: usize) -> usize {
        let [w, h, d] = self.geometry.dims;
        debug_assert!(channel < CHANNELS && x < w && y < h && z < d);
        ((channel * d + z) * h + y) * w + x
    }

    #[inline]
    pub fn get(&self, channel: usize, x: usize, y: usize, z: usize) -> f64 {
        self.data[self.index(channel, x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, x: usize, y: usize, z: usize, value: f64) {
        let i = self.index(channel, x, y, z);
        self.data[i] = value;
    }

    /// One channel as a contiguous slice of `voxel_count()` values.
    pub fn channel(&self, channel: usize) -> &[f64] {
        let n = self.geometry.voxel_count();
        &self.data[channel * n..(channel + 1) * n]
    }

    pub fn channel_mut(&mut self, channel: usize) -> &mut [f64] {
        let n = self.geometry.voxel_count();
        &mut self.data[channel * n..(channel + 1) * n]
    }

    /// Number of voxels whose occupancy value exceeds 1/2.
    pub fn occupied_count(&self) -> usize {
        self.channel(CH_PI).iter().filter(|&&v| v > 0.5).count()
    }

    /// Flat per-channel indices of occupied voxels (occupancy > 1/2).
    pub fn occupied_indices(&self) -> Vec<usize> {
        self.channel(CH_PI)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Counters reported alongside a voxelization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VoxelizeStats {
    /// Points that landed in an already-occupied voxel.
    pub collisions: usize,
}

/// Computes the grid geometry for a cloud: exact bounding box, dimensions
/// from the voxel size.
pub fn compute_geometry(cloud: &PointCloud, voxel_size: f64) -> Result<GridGeometry> {
    if voxel_size <= 0.0 || !voxel_size.is_finite() {
        return Err(Error::NonPositiveVoxelSize(voxel_size));
    }
    let (mins, maxs) = cloud.bounds();
    GridGeometry::from_bounds(mins, maxs, voxel_size)
}

/// Geometry covering the union bounding box of two clouds, so both can be
/// voxelized onto grids of identical shape.
pub fn compute_shared_geometry(a: &PointCloud, b: &PointCloud, voxel_size: f64) -> Result<GridGeometry> {
    if voxel_size <= 0.0 || !voxel_size.is_finite() {
        return Err(Error::NonPositiveVoxelSize(voxel_size));
    }
    let (a_min, a_max) = a.bounds();
    let (b_min, b_max) = b.bounds();
    let mins = [a_min[0].min(b_min[0]), a_min[1].min(b_min[1]), a_min[2].min(b_min[2])];
    let maxs = [a_max[0].max(b_max[0]), a_max[1].max(b_max[1]), a_max[2].max(b_max[2])];
    GridGeometry::from_bounds(mins, maxs, voxel_size)
}

/// Maps a cloud onto a grid: occupied voxels get occupancy 1 and the
/// point's color; everything else stays zero.
pub fn voxelize(cloud: &PointCloud, geometry: &GridGeometry) -> Result<VoxelGrid> {
    voxelize_with_stats(cloud, geometry).map(|(grid, _)| grid)
}

/// As [`voxelize`], also reporting how many points collided with an
/// already-occupied voxel. Colliding colors are averaged.
pub fn voxelize_with_stats(
    cloud: &PointCloud,
    geometry: &GridGeometry,
) -> Result<(VoxelGrid, VoxelizeStats)> {
    let mut grid = VoxelGrid::zeros(geometry.clone());
    let n = geometry.voxel_count();
    // Per-voxel point counts so colliding colors can be averaged.
    let mut counts = vec![0u32; n];

    for (index, p) in cloud.iter().enumerate() {
        if !geometry.contains(p) {
            return Err(Error::PointOutOfBounds {
                index,
                x: p.x,
                y: p.y,
                z: p.z,
                x_min: geometry.mins[0],
                x_max: geometry.maxs[0],
                y_min: geometry.mins[1],
                y_max: geometry.maxs[1],
                z_min: geometry.mins[2],
                z_max: geometry.maxs[2],
            });
        }
        let [x, y, z] = geometry.voxel_index(p);
        let flat = (z * geometry.dims[1] + y) * geometry.dims[0] + x;
        counts[flat] += 1;
        grid.data[CH_R * n + flat] += p.r;
        grid.data[CH_G * n + flat] += p.g;
        grid.data[CH_B * n + flat] += p.b;
        grid.data[CH_PI * n + flat] = 1.0;
    }

    let mut collisions = 0usize;
    for (flat, &count) in counts.iter().enumerate() {
        if count > 1 {
            collisions += count as usize - 1;
            let inv = 1.0 / count as f64;
            grid.data[CH_R * n + flat] *= inv;
            grid.data[CH_G * n + flat] *= inv;
            grid.data[CH_B * n + flat] *= inv;
        }
    }

    Ok((grid, VoxelizeStats { collisions }))
}

/// Emits one point per occupied voxel, placed at the voxel center with the
/// voxel's color clamped to `[0, 1]`.
pub fn devoxelize(grid: &VoxelGrid) -> Result<PointCloud> {
    let geometry = grid.geometry();
    let [w, h, d] = geometry.dims();
    let mut points = Vec::new();
    let mut max_pi = f64::NEG_INFINITY;

    for z in 0..d {
        for y in 0..h {
            for x in 0..w {
                let pi = grid.get(CH_PI, x, y, z);
                max_pi = max_pi.max(pi);
                if pi > 0.5 {
                    let [cx, cy, cz] = geometry.voxel_center(x, y, z);
                    points.push(Point::new(
                        cx,
                        cy,
                        cz,
                        grid.get(CH_R, x, y, z).clamp(0.0, 1.0),
                        grid.get(CH_G, x, y, z).clamp(0.0, 1.0),
                        grid.get(CH_B, x, y, z).clamp(0.0, 1.0),
                    ));
                }
            }
        }
    }

    if points.is_empty() {
        return Err(Error::EmptyReconstruction {
            occupied: 0,
            max_pi: if max_pi.is_finite() { max_pi } else { 0.0 },
        });
    }
    PointCloud::new(points)
}
