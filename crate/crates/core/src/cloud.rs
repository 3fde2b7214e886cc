//! Colored point clouds: the continuous-space representation everything
//! else is derived from.

use crate::error::{Error, Result};

/// One point of a colored point cloud: spatial coordinates plus an RGB
/// color with components in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Point {
    pub fn new(x: f64, y: f64, z: f64, r: f64, g: f64, b: f64) -> Self {
        Point { x, y, z, r, g, b }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn color(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    fn check(&self) -> std::result::Result<(), String> {
        for (axis, v) in [("x", self.x), ("y", self.y), ("z", self.z)] {
            if !v.is_finite() {
                return Err(format!("coordinate {axis} is not finite ({v})"));
            }
        }
        for (chan, v) in [("r", self.r), ("g", self.g), ("b", self.b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("color {chan} = {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// An ordered, non-empty sequence of colored points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    /// Builds a cloud, validating that it is non-empty, that every
    /// coordinate is finite and that every color lies in `[0, 1]`.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        for (index, p) in points.iter().enumerate() {
            if let Err(reason) = p.check() {
                return Err(Error::InvalidPoint { index, reason });
            }
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Exact per-axis minima and maxima of the point coordinates.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut mins = [f64::INFINITY; 3];
        let mut maxs = [f64::NEG_INFINITY; 3];
        for p in &self.points {
            for (axis, v) in p.position().into_iter().enumerate() {
                mins[axis] = mins[axis].min(v);
                maxs[axis] = maxs[axis].max(v);
            }
        }
        (mins, maxs)
    }

    /// Centers the cloud at its centroid and scales all axes by a single
    /// factor so the widest axis spans `[-1, 1]`. Colors are untouched.
    /// A degenerate cloud (all points coincident) is only centered.
    pub fn normalized_to_unit(&self) -> PointCloud {
        let n = self.points.len() as f64;
        let mut centroid = [0.0f64; 3];
        for p in &self.points {
            for (axis, v) in p.position().into_iter().enumerate() {
                centroid[axis] += v;
            }
        }
        for c in &mut centroid {
            *c /= n;
        }

        let mut half_extent = 0.0f64;
        for p in &self.points {
            for (axis, v) in p.position().into_iter().enumerate() {
                half_extent = half_extent.max((v - centroid[axis]).abs());
            }
        }
        let scale = if half_extent > 0.0 { 1.0 / half_extent } else { 1.0 };

        let points = self
            .points
            .iter()
            .map(|p| Point {
                x: (p.x - centroid[0]) * scale,
                y: (p.y - centroid[1]) * scale,
                z: (p.z - centroid[2]) * scale,
                ..*p
            })
            .collect();
        PointCloud { points }
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
