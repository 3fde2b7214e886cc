//! The decomposition/reconstruction pipeline and the component-swapping
//! operations built on it.
//!
//! A cloud is voxelized, transformed, and split into amplitude and phase.
//! Modified component pairs are recombined, inverse-transformed, and
//! filtered through the occupancy channel: voxels whose reconstructed
//! occupancy clears the threshold become points again. Swapping the
//! amplitude between two clouds exchanges color attributes; swapping the
//! phase exchanges geometric structure.

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};
use crate::transform::{forward_dft, from_amplitude_phase, inverse_dft, to_amplitude_phase, AmplitudePhase};
use crate::voxel::{
    compute_geometry, voxelize, GridGeometry, VoxelGrid, CH_B, CH_G, CH_PI, CH_R,
};

/// Which channels take part in amplitude exchanges.
///
/// `All` is the literal component swap over R, G, B and occupancy.
/// `RgbOnly` leaves the occupancy amplitude with its phase donor, so the
/// occupied-voxel set of each output is exactly that of its phase donor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMode {
    #[default]
    All,
    RgbOnly,
}

/// Parameters of the occupancy-thresholded reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionParams {
    /// Voxels whose reconstructed occupancy exceeds this value become
    /// points. A threshold of 0 disables noise removal entirely: every
    /// voxel is kept, including those driven negative by spectral mixing.
    pub pi_threshold: f64,
    pub channel_mode: ChannelMode,
}

impl Default for ReconstructionParams {
    fn default() -> Self {
        ReconstructionParams { pi_threshold: 0.5, channel_mode: ChannelMode::All }
    }
}

impl ReconstructionParams {
    pub fn with_threshold(pi_threshold: f64) -> Self {
        ReconstructionParams { pi_threshold, ..Default::default() }
    }
}

/// Voxelizes a cloud on its own bounding box and returns the amplitude
/// and phase of its spectrum.
pub fn decompose(cloud: &PointCloud, voxel_size: f64) -> Result<AmplitudePhase> {
    let geometry = compute_geometry(cloud, voxel_size)?;
    decompose_with_geometry(cloud, &geometry)
}

/// As [`decompose`] over an explicit geometry, e.g. one shared by two
/// clouds so their spectra can be combined elementwise.
pub fn decompose_with_geometry(cloud: &PointCloud, geometry: &GridGeometry) -> Result<AmplitudePhase> {
    let grid = voxelize(cloud, geometry)?;
    Ok(to_amplitude_phase(&forward_dft(&grid)))
}

/// Inverse-transforms an amplitude/phase pair back to a real-valued grid.
pub fn reconstruct_grid(ap: &AmplitudePhase) -> Result<VoxelGrid> {
    Ok(inverse_dft(&from_amplitude_phase(ap)?))
}

/// Reconstructs a point cloud from an amplitude/phase pair: voxels whose
/// reconstructed occupancy clears the threshold become points at voxel
/// centers, with colors clamped to `[0, 1]`.
pub fn reconstruct(ap: &AmplitudePhase, params: &ReconstructionParams) -> Result<PointCloud> {
    if params.pi_threshold < 0.0 || params.pi_threshold.is_nan() {
        return Err(Error::NegativeThreshold(params.pi_threshold));
    }
    let grid = reconstruct_grid(ap)?;
    let geometry = grid.geometry();
    let [w, h, d] = geometry.dims();
    let keep_all = params.pi_threshold == 0.0;

    let mut points = Vec::new();
    let mut max_pi = f64::NEG_INFINITY;
    for z in 0..d {
        for y in 0..h {
            for x in 0..w {
                let pi = grid.get(CH_PI, x, y, z);
                max_pi = max_pi.max(pi);
                if keep_all || pi > params.pi_threshold {
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
        return Err(Error::EmptyReconstruction { occupied: 0, max_pi });
    }
    PointCloud::new(points)
}

fn check_same_shape(a: &AmplitudePhase, b: &AmplitudePhase) -> Result<()> {
    if !a.geometry().same_shape(b.geometry()) {
        return Err(Error::GeometryMismatch {
            left: Box::new(a.geometry().clone()),
            right: Box::new(b.geometry().clone()),
        });
    }
    Ok(())
}

/// Exchanges the amplitude between two spectra while each keeps its own
/// phase. Under [`ChannelMode::RgbOnly`] the occupancy amplitude is not
/// exchanged. Applying the swap twice restores the inputs bit-exactly.
pub fn amplitude_swap(
    first: &AmplitudePhase,
    second: &AmplitudePhase,
    mode: ChannelMode,
) -> Result<(AmplitudePhase, AmplitudePhase)> {
    check_same_shape(first, second)?;
    let mut out_first = first.clone();
    let mut out_second = second.clone();
    let n = first.geometry().voxel_count();
    let swapped = match mode {
        ChannelMode::All => 0..4 * n,
        ChannelMode::RgbOnly => 0..3 * n, // R, G, B are the leading channels
    };
    out_first.amplitude[swapped.clone()].swap_with_slice(&mut out_second.amplitude[swapped]);
    Ok((out_first, out_second))
}

/// Exchanges the phase between two spectra while each keeps its own
/// amplitude. All four channels always participate; the grid geometry
/// follows the phase, which carries the structure.
pub fn phase_swap(
    first: &AmplitudePhase,
    second: &AmplitudePhase,
) -> Result<(AmplitudePhase, AmplitudePhase)> {
    check_same_shape(first, second)?;
    let out_first = AmplitudePhase {
        geometry: second.geometry.clone(),
        amplitude: first.amplitude.clone(),
        phase: second.phase.clone(),
    };
    let out_second = AmplitudePhase {
        geometry: first.geometry.clone(),
        amplitude: second.amplitude.clone(),
        phase: first.phase.clone(),
    };
    Ok((out_first, out_second))
}

/// Convex combination of two amplitude arrays:
/// `(1 - gamma) * content + gamma * style`. The endpoints return the
/// respective input bit-exactly.
pub fn interpolate_amplitude(content: &[f64], style: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if content.len() != style.len() {
        return Err(Error::ShapeMismatch { expected: content.len(), actual: style.len() });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if gamma == 0.0 {
        return Ok(content.to_vec());
    }
    if gamma == 1.0 {
        return Ok(style.to_vec());
    }
    Ok(content
        .iter()
        .zip(style)
        .map(|(&a, &b)| (1.0 - gamma) * a + gamma * b)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voxel::{compute_shared_geometry, devoxelize, CHANNELS};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| {
                Point::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..1.0),
                )
            })
            .collect();
        PointCloud::new(points).unwrap()
    }

    /// Voxel indices of a reconstructed cloud, recovered through the
    /// geometry of the pair it came from.
    fn voxel_set(cloud: &PointCloud, geometry: &GridGeometry) -> std::collections::BTreeSet<[usize; 3]> {
        cloud.iter().map(|p| geometry.voxel_index(p)).collect()
    }

    #[test]
    fn decompose_single_point_is_unit_dc() {
        let cloud = PointCloud::new(vec![Point::new(0.0, 0.0, 0.0, 0.3, 0.3, 0.3)]).unwrap();
        let ap = decompose(&cloud, 1.0).unwrap();
        assert_eq!(ap.geometry().dims(), [1, 1, 1]);
        let n = ap.geometry().voxel_count();
        assert!((ap.amplitude()[CH_PI * n] - 1.0).abs() < 1e-12);
        assert_eq!(ap.phase()[CH_PI * n], 0.0);
    }

    #[test]
    fn decompose_shapes_match_independent_geometry() {
        let cloud = random_cloud(200, 1);
        let v = 0.125;
        let ap = decompose(&cloud, v).unwrap();
        // Recompute the dimension formula directly from the bounds.
        let (mins, maxs) = cloud.bounds();
        let dims: Vec<usize> = (0..3)
            .map(|a| (((maxs[a] - mins[a]) / v).ceil() as usize).max(1))
            .collect();
        assert_eq!(ap.geometry().dims().to_vec(), dims);
        assert_eq!(ap.amplitude().len(), CHANNELS * dims.iter().product::<usize>());
    }

    #[test]
    fn round_trip_reproduces_voxelized_cloud() {
        let cloud = random_cloud(300, 2);
        let v = 0.25;
        let ap = decompose(&cloud, v).unwrap();
        let rebuilt = reconstruct(&ap, &ReconstructionParams::default()).unwrap();

        let expected = devoxelize(&voxelize(&cloud, &compute_geometry(&cloud, v).unwrap()).unwrap())
            .unwrap();
        assert_eq!(rebuilt.len(), expected.len());
        for (a, b) in rebuilt.iter().zip(expected.iter()) {
            assert_eq!(a.position(), b.position());
            for (ca, cb) in a.color().into_iter().zip(b.color()) {
                assert!((ca - cb).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_threshold_emits_every_voxel() {
        let a = random_cloud(60, 3);
        let b = random_cloud(60, 4);
        let geom = compute_shared_geometry(&a, &b, 0.5).unwrap();
        let ap_a = decompose_with_geometry(&a, &geom).unwrap();
        let ap_b = decompose_with_geometry(&b, &geom).unwrap();
        let (mixed, _) = amplitude_swap(&ap_a, &ap_b, ChannelMode::All).unwrap();
        let cloud = reconstruct(&mixed, &ReconstructionParams::with_threshold(0.0)).unwrap();
        assert_eq!(cloud.len(), geom.voxel_count());
    }

    #[test]
    fn threshold_above_binary_range_errors() {
        let cloud = random_cloud(50, 5);
        let ap = decompose(&cloud, 0.5).unwrap();
        match reconstruct(&ap, &ReconstructionParams::with_threshold(1.5)) {
            Err(Error::EmptyReconstruction { occupied, max_pi }) => {
                assert_eq!(occupied, 0);
                assert!((max_pi - 1.0).abs() < 1e-9);
            }
            other => panic!("expected empty reconstruction, got {other:?}"),
        }
    }

    #[test]
    fn negative_threshold_rejected() {
        let cloud = random_cloud(10, 6);
        let ap = decompose(&cloud, 0.5).unwrap();
        assert!(matches!(
            reconstruct(&ap, &ReconstructionParams::with_threshold(-0.1)),
            Err(Error::NegativeThreshold(_))
        ));
    }

    #[test]
    fn self_swap_is_identity() {
        let cloud = random_cloud(40, 7);
        let ap = decompose(&cloud, 0.5).unwrap();
        let (a, b) = amplitude_swap(&ap, &ap, ChannelMode::All).unwrap();
        assert_eq!(a, ap);
        assert_eq!(b, ap);
        let (a, b) = phase_swap(&ap, &ap).unwrap();
        assert_eq!(a, ap);
        assert_eq!(b, ap);
    }

    #[test]
    fn swaps_are_involutions() {
        let c1 = random_cloud(50, 8);
        let c2 = random_cloud(70, 9);
        let geom = compute_shared_geometry(&c1, &c2, 0.5).unwrap();
        let ap1 = decompose_with_geometry(&c1, &geom).unwrap();
        let ap2 = decompose_with_geometry(&c2, &geom).unwrap();

        for mode in [ChannelMode::All, ChannelMode::RgbOnly] {
            let (s1, s2) = amplitude_swap(&ap1, &ap2, mode).unwrap();
            let (r1, r2) = amplitude_swap(&s1, &s2, mode).unwrap();
            assert_eq!(r1, ap1);
            assert_eq!(r2, ap2);
        }

        let (s1, s2) = phase_swap(&ap1, &ap2).unwrap();
        let (r1, r2) = phase_swap(&s1, &s2).unwrap();
        assert_eq!(r1, ap1);
        assert_eq!(r2, ap2);
    }

    #[test]
    fn amplitude_then_phase_swap_exchanges_everything() {
        let c1 = random_cloud(30, 10);
        let c2 = random_cloud(30, 11);
        let geom = compute_shared_geometry(&c1, &c2, 0.5).unwrap();
        let ap1 = decompose_with_geometry(&c1, &geom).unwrap();
        let ap2 = decompose_with_geometry(&c2, &geom).unwrap();

        let (p1, p2) = phase_swap(&ap1, &ap2).unwrap();
        let (f1, f2) = amplitude_swap(&p1, &p2, ChannelMode::All).unwrap();
        assert_eq!(f1, ap2);
        assert_eq!(f2, ap1);
    }

    #[test]
    fn swap_rejects_mismatched_shapes() {
        let ap1 = decompose(&random_cloud(40, 12), 0.5).unwrap();
        let ap2 = decompose(&random_cloud(40, 13), 0.25).unwrap();
        assert!(matches!(
            amplitude_swap(&ap1, &ap2, ChannelMode::All),
            Err(Error::GeometryMismatch { .. })
        ));
        assert!(matches!(phase_swap(&ap1, &ap2), Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn rgb_only_swap_preserves_phase_donor_voxel_sets() {
        let c1 = random_cloud(80, 14);
        let c2 = random_cloud(90, 15);
        let geom = compute_shared_geometry(&c1, &c2, 0.5).unwrap();
        let ap1 = decompose_with_geometry(&c1, &geom).unwrap();
        let ap2 = decompose_with_geometry(&c2, &geom).unwrap();
        let (s1, s2) = amplitude_swap(&ap1, &ap2, ChannelMode::RgbOnly).unwrap();

        let params = ReconstructionParams::default();
        let own1 = voxel_set(&reconstruct(&ap1, &params).unwrap(), &geom);
        let own2 = voxel_set(&reconstruct(&ap2, &params).unwrap(), &geom);
        let swapped1 = voxel_set(&reconstruct(&s1, &params).unwrap(), &geom);
        let swapped2 = voxel_set(&reconstruct(&s2, &params).unwrap(), &geom);
        assert_eq!(swapped1, own1);
        assert_eq!(swapped2, own2);
    }

    #[test]
    fn interpolation_endpoints_are_bit_exact() {
        let a = vec![1.0, 2.5, 0.0, 7.0];
        let b = vec![4.0, 0.5, 1.0, 7.0];
        assert_eq!(interpolate_amplitude(&a, &b, 0.0).unwrap(), a);
        assert_eq!(interpolate_amplitude(&a, &b, 1.0).unwrap(), b);
    }

    #[test]
    fn interpolation_midpoint() {
        let a = vec![2.0; 8];
        let b = vec![4.0; 8];
        let mid = interpolate_amplitude(&a, &b, 0.5).unwrap();
        assert!(mid.iter().all(|&v| (v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn interpolation_stays_between_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..5.0)).collect();
        let b: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..5.0)).collect();
        for gamma in [0.1, 0.33, 0.5, 0.9] {
            let out = interpolate_amplitude(&a, &b, gamma).unwrap();
            for ((&x, &y), &o) in a.iter().zip(&b).zip(&out) {
                assert!(o >= x.min(y) - 1e-12 && o <= x.max(y) + 1e-12);
                assert!(o >= 0.0);
            }
        }
    }

    #[test]
    fn interpolation_rejects_gamma_outside_unit_interval() {
        let a = vec![1.0];
        assert!(matches!(
            interpolate_amplitude(&a, &a, -0.01),
            Err(Error::GammaOutOfRange(_))
        ));
        assert!(interpolate_amplitude(&a, &a, 1.01).is_err());
        assert!(interpolate_amplitude(&a, &a, f64::NAN).is_err());
    }

    #[test]
    fn point_count_is_non_increasing_in_threshold() {
        let a = random_cloud(120, 17);
        let b = random_cloud(100, 18);
        let geom = compute_shared_geometry(&a, &b, 0.25).unwrap();
        let ap_a = decompose_with_geometry(&a, &geom).unwrap();
        let ap_b = decompose_with_geometry(&b, &geom).unwrap();
        let (mixed, _) = amplitude_swap(&ap_a, &ap_b, ChannelMode::All).unwrap();

        let mut previous = usize::MAX;
        for threshold in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let count = match reconstruct(&mixed, &ReconstructionParams::with_threshold(threshold)) {
                Ok(cloud) => cloud.len(),
                Err(Error::EmptyReconstruction { .. }) => 0,
                Err(other) => panic!("unexpected error: {other:?}"),
            };
            assert!(count <= previous, "count {count} rose at threshold {threshold}");
            if threshold == 0.0 {
                assert_eq!(count, geom.voxel_count());
            }
            previous = count;
        }
    }
}
