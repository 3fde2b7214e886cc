//! Style transfer front-ends: blending the amplitude of a content cloud
//! with that of a style source (another cloud or a 2D image) while the
//! content's phase fixes the geometry.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::spectral::{
    decompose_with_geometry, interpolate_amplitude, reconstruct, ChannelMode, ReconstructionParams,
};
use crate::transform::{forward_dft, to_amplitude_phase, AmplitudePhase};
use crate::voxel::{
    compute_geometry, compute_shared_geometry, GridGeometry, VoxelGrid, CHANNELS, CH_PI,
};

/// A 2D RGB image with components in `[0, 1]`, row-major, pixels
/// interleaved as `r, g, b`.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl StyleImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height * 3 {
            return Err(Error::ShapeMismatch {
                expected: width * height * 3,
                actual: pixels.len(),
            });
        }
        for (index, &v) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidPoint {
                    index: index / 3,
                    reason: format!("pixel value {v} outside [0, 1]"),
                });
            }
        }
        Ok(StyleImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Bilinear resample to `width x height`, sampling at pixel centers.
    /// Resizing to the current dimensions returns the image unchanged.
    pub fn resized(&self, width: usize, height: usize) -> StyleImage {
        if width == self.width && height == self.height {
            return self.clone();
        }
        let mut pixels = Vec::with_capacity(width * height * 3);
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        for y in 0..height {
            // Center-aligned source coordinate, clamped at the borders.
            let v = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = v.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let fy = v - y0 as f64;
            for x in 0..width {
                let u = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = u.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let fx = u - x0 as f64;

                let p00 = self.pixel(x0, y0);
                let p10 = self.pixel(x1, y0);
                let p01 = self.pixel(x0, y1);
                let p11 = self.pixel(x1, y1);
                for c in 0..3 {
                    let top = p00[c] * (1.0 - fx) + p10[c] * fx;
                    let bottom = p01[c] * (1.0 - fx) + p11[c] * fx;
                    pixels.push(top * (1.0 - fy) + bottom * fy);
                }
            }
        }
        StyleImage { width, height, pixels }
    }
}

/// Builds the voxel grid an image stands in for: the image resized to
/// `W x H`, replicated `D` times along depth, with occupancy 1 everywhere.
pub fn image_slab(image: &StyleImage, geometry: &GridGeometry) -> VoxelGrid {
    let [w, h, d] = geometry.dims();
    let resized = image.resized(w, h);
    let mut grid = VoxelGrid::zeros(geometry.clone());
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = resized.pixel(x, y);
            for z in 0..d {
                grid.set(0, x, y, z, r);
                grid.set(1, x, y, z, g);
                grid.set(2, x, y, z, b);
                grid.set(CH_PI, x, y, z, 1.0);
            }
        }
    }
    grid
}

/// Amplitude of an image adapted to a point-cloud grid: resize to
/// `W x H`, stack along depth, transform, discard the phase. Constant
/// depth makes every coefficient outside the `m = 0` frequency plane
/// vanish.
pub fn image_to_style_amplitude(image: &StyleImage, geometry: &GridGeometry) -> Vec<f64> {
    let spectrum = forward_dft(&image_slab(image, geometry));
    to_amplitude_phase(&spectrum).amplitude
}

fn blend(
    content: &AmplitudePhase,
    style_amplitude: &[f64],
    gamma: f64,
    mode: ChannelMode,
) -> Result<AmplitudePhase> {
    let n = content.geometry().voxel_count();
    let blended_channels = match mode {
        ChannelMode::All => CHANNELS,
        ChannelMode::RgbOnly => CHANNELS - 1,
    };
    let split = blended_channels * n;
    let mut amplitude = interpolate_amplitude(
        &content.amplitude()[..split],
        &style_amplitude[..split],
        gamma,
    )?;
    amplitude.extend_from_slice(&content.amplitude()[split..]);
    AmplitudePhase::new(content.geometry().clone(), amplitude, content.phase().to_vec())
}

/// Point-cloud-to-point-cloud style transfer: both clouds are decomposed
/// over the union of their bounding boxes, the amplitudes are blended
/// with weight `gamma`, and the result is reconstructed with the
/// content's phase.
pub fn stylize(
    content: &PointCloud,
    style: &PointCloud,
    gamma: f64,
    params: &ReconstructionParams,
    voxel_size: f64,
) -> Result<PointCloud> {
    let geometry = compute_shared_geometry(content, style, voxel_size)?;
    let content_ap = decompose_with_geometry(content, &geometry)?;
    let style_ap = decompose_with_geometry(style, &geometry)?;
    let stylized = blend(&content_ap, style_ap.amplitude(), gamma, params.channel_mode)?;
    reconstruct(&stylized, params)
}

/// Image-to-point-cloud style transfer: the image provides the style
/// amplitude on the content's own grid.
pub fn stylize_from_image(
    content: &PointCloud,
    image: &StyleImage,
    gamma: f64,
    params: &ReconstructionParams,
    voxel_size: f64,
) -> Result<PointCloud> {
    let geometry = compute_geometry(content, voxel_size)?;
    let content_ap = decompose_with_geometry(content, &geometry)?;
    let style_amplitude = image_to_style_amplitude(image, &geometry);
    let stylized = blend(&content_ap, &style_amplitude, gamma, params.channel_mode)?;
    reconstruct(&stylized, params)
}
