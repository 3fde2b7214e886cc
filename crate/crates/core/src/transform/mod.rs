//! Forward and inverse 3D discrete Fourier transforms over 4-channel
//! voxel grids, and the amplitude/phase view of a spectrum.
//!
//! Convention: the forward transform is unnormalized, the inverse carries
//! the `1/(W*H*D)` factor. Arbitrary grid dimensions are supported; the
//! fast path delegates per-axis lines to a mixed-radix/Bluestein FFT and
//! is checked against the direct-summation route in [`direct`].

pub mod direct;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::voxel::{GridGeometry, VoxelGrid, CHANNELS};

/// Complex frequency-domain counterpart of a [`VoxelGrid`]. Same
/// channel-major, x-fastest layout, indexed by frequencies `(k, l, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub(crate) geometry: GridGeometry,
    pub(crate) coeffs: Vec<Complex<f64>>,
}

impl Spectrum {
    /// Wraps raw coefficients, checking the length.
    pub fn from_parts(geometry: GridGeometry, coeffs: Vec<Complex<f64>>) -> Result<Self> {
        let expected = CHANNELS * geometry.voxel_count();
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: coeffs.len() });
        }
        Ok(Spectrum { geometry, coeffs })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    /// One channel as a contiguous slice of `voxel_count()` coefficients.
    pub fn channel(&self, channel: usize) -> &[Complex<f64>] {
        let n = self.geometry.voxel_count();
        &self.coeffs[channel * n..(channel + 1) * n]
    }

    #[inline]
    pub fn get(&self, channel: usize, k: usize, l: usize, m: usize) -> Complex<f64> {
        let [w, h, _] = self.geometry.dims();
        self.coeffs[((channel * self.geometry.depth() + m) * h + l) * w + k]
    }
}

/// Polar view of a spectrum: `amplitude * exp(i * phase)` recovers the
/// complex coefficients. Amplitude is non-negative, phase lies in
/// `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudePhase {
    pub(crate) geometry: GridGeometry,
    pub(crate) amplitude: Vec<f64>,
    pub(crate) phase: Vec<f64>,
}

impl AmplitudePhase {
    /// Builds from raw arrays, validating shapes and amplitude sign.
    pub fn new(geometry: GridGeometry, amplitude: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        let expected = CHANNELS * geometry.voxel_count();
        if amplitude.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: amplitude.len() });
        }
        if phase.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: phase.len() });
        }
        for (index, &a) in amplitude.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidAmplitude { index, value: a });
            }
        }
        Ok(AmplitudePhase { geometry, amplitude, phase })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// One amplitude channel as a contiguous slice.
    pub fn amplitude_channel(&self, channel: usize) -> &[f64] {
        let n = self.geometry.voxel_count();
        &self.amplitude[channel * n..(channel + 1) * n]
    }
}

static THREAD_CAP: AtomicUsize = AtomicUsize::new(0);

/// Caps the number of threads used for per-channel transforms;
/// 0 restores automatic selection. Results are bit-identical for any
/// setting because channels are transformed independently.
pub fn set_thread_cap(cap: usize) {
    THREAD_CAP.store(cap, Ordering::Relaxed);
}

fn effective_threads() -> usize {
    let cap = THREAD_CAP.load(Ordering::Relaxed);
    let auto = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let limit = if cap == 0 { auto } else { cap.min(auto) };
    limit.min(CHANNELS)
}

/// Runs `f` over the four per-channel chunks of `buffer`, in scoped
/// threads when allowed, sequentially otherwise.
fn for_each_channel<F>(buffer: &mut [Complex<f64>], chunk: usize, f: F)
where
    F: Fn(&mut [Complex<f64>]) + Sync,
{
    // Thread spawn overhead dominates on tiny grids.
    if effective_threads() >= 2 && chunk >= 4096 {
        std::thread::scope(|scope| {
            for part in buffer.chunks_mut(chunk) {
                scope.spawn(|| f(part));
            }
        });
    } else {
        for part in buffer.chunks_mut(chunk) {
            f(part);
        }
    }
}

/// In-place 3D FFT of one channel stored x-fastest.
fn transform_channel(buffer: &mut [Complex<f64>], dims: [usize; 3], direction: FftDirection) {
    let [w, h, d] = dims;
    let mut planner = FftPlanner::new();

    if w > 1 {
        let fft = planner.plan_fft(w, direction);
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        for row in buffer.chunks_exact_mut(w) {
            fft.process_with_scratch(row, &mut scratch);
        }
    }

    if h > 1 {
        let fft = planner.plan_fft(h, direction);
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        let mut lane = vec![Complex::default(); h];
        for z in 0..d {
            for x in 0..w {
                let base = z * h * w + x;
                for (y, slot) in lane.iter_mut().enumerate() {
                    *slot = buffer[base + y * w];
                }
                fft.process_with_scratch(&mut lane, &mut scratch);
                for (y, slot) in lane.iter().enumerate() {
                    buffer[base + y * w] = *slot;
                }
            }
        }
    }

    if d > 1 {
        let fft = planner.plan_fft(d, direction);
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        let mut lane = vec![Complex::default(); d];
        let plane = h * w;
        for y in 0..h {
            for x in 0..w {
                let base = y * w + x;
                for (z, slot) in lane.iter_mut().enumerate() {
                    *slot = buffer[base + z * plane];
                }
                fft.process_with_scratch(&mut lane, &mut scratch);
                for (z, slot) in lane.iter().enumerate() {
                    buffer[base + z * plane] = *slot;
                }
            }
        }
    }
}

/// Unnormalized forward 3D DFT of every channel.
pub fn forward_dft(grid: &VoxelGrid) -> Spectrum {
    let geometry = grid.geometry().clone();
    let dims = geometry.dims();
    let n = geometry.voxel_count();
    let mut coeffs: Vec<Complex<f64>> =
        grid.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    for_each_channel(&mut coeffs, n, |chunk| {
        transform_channel(chunk, dims, FftDirection::Forward)
    });
    Spectrum { geometry, coeffs }
}

/// Inverse 3D DFT with `1/(W*H*D)` normalization. The real part becomes
/// the voxel data; for spectra assembled from mismatched components the
/// imaginary residue is discarded and the occupancy channel is
/// continuous-valued rather than binary.
pub fn inverse_dft(spectrum: &Spectrum) -> VoxelGrid {
    let geometry = spectrum.geometry().clone();
    let dims = geometry.dims();
    let n = geometry.voxel_count();
    let mut coeffs = spectrum.coeffs.clone();
    for_each_channel(&mut coeffs, n, |chunk| {
        transform_channel(chunk, dims, FftDirection::Inverse)
    });
    let scale = 1.0 / n as f64;
    let data = coeffs.iter().map(|c| c.re * scale).collect();
    VoxelGrid::from_parts(geometry, data).expect("inverse preserves shape")
}

/// Splits a spectrum into `|F|` and `arg F`. The phase of a zero
/// coefficient is defined as 0, and `-pi` is folded to `pi` so phases lie
/// in `(-pi, pi]`.
pub fn to_amplitude_phase(spectrum: &Spectrum) -> AmplitudePhase {
    let len = spectrum.coeffs.len();
    let mut amplitude = Vec::with_capacity(len);
    let mut phase = Vec::with_capacity(len);
    for c in &spectrum.coeffs {
        let a = c.norm();
        amplitude.push(a);
        let p = if a == 0.0 {
            0.0
        } else {
            let arg = c.arg();
            if arg == -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                arg
            }
        };
        phase.push(p);
    }
    AmplitudePhase { geometry: spectrum.geometry.clone(), amplitude, phase }
}

/// Recombines `amplitude * exp(i * phase)` into a spectrum.
pub fn from_amplitude_phase(ap: &AmplitudePhase) -> Result<Spectrum> {
    for (index, &a) in ap.amplitude.iter().enumerate() {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidAmplitude { index, value: a });
        }
    }
    let coeffs = ap
        .amplitude
        .iter()
        .zip(&ap.phase)
        .map(|(&a, &p)| Complex::from_polar(a, p))
        .collect();
    Ok(Spectrum { geometry: ap.geometry.clone(), coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voxel::{GridGeometry, CH_PI, CH_R};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn geometry(w: usize, h: usize, d: usize) -> GridGeometry {
        GridGeometry::from_bounds(
            [0.0; 3],
            [w as f64, h as f64, d as f64],
            1.0,
        )
        .unwrap()
    }

    fn random_grid(dims: [usize; 3], rng: &mut ChaCha8Rng) -> VoxelGrid {
        let geom = geometry(dims[0], dims[1], dims[2]);
        let data = (0..CHANNELS * geom.voxel_count())
            .map(|_| rng.random_range(0.0..1.0))
            .collect();
        VoxelGrid::from_parts(geom, data).unwrap()
    }

    fn random_spectrum(dims: [usize; 3], rng: &mut ChaCha8Rng) -> Spectrum {
        let geom = geometry(dims[0], dims[1], dims[2]);
        let coeffs = (0..CHANNELS * geom.voxel_count())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Spectrum::from_parts(geom, coeffs).unwrap()
    }

    fn max_abs_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_voxel_dc_coefficient() {
        let geom = geometry(1, 1, 1);
        let mut grid = VoxelGrid::zeros(geom);
        grid.set(CH_PI, 0, 0, 0, 1.0);
        let spec = forward_dft(&grid);
        assert_eq!(spec.get(CH_PI, 0, 0, 0), Complex::new(1.0, 0.0));
        assert_eq!(spec.get(CH_R, 0, 0, 0), Complex::new(0.0, 0.0));
    }

    #[test]
    fn delta_transforms_to_constant() {
        let geom = geometry(4, 4, 4);
        let mut grid = VoxelGrid::zeros(geom);
        grid.set(CH_PI, 0, 0, 0, 1.0);
        let spec = forward_dft(&grid);
        for &c in spec.channel(CH_PI) {
            assert!((c - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_spectrum_inverts_to_delta() {
        let geom = geometry(4, 4, 4);
        let n = geom.voxel_count();
        let mut coeffs = vec![Complex::new(0.0, 0.0); CHANNELS * n];
        for c in coeffs[CH_R * n..(CH_R + 1) * n].iter_mut() {
            *c = Complex::new(1.0, 0.0);
        }
        let spec = Spectrum::from_parts(geom, coeffs).unwrap();
        let grid = inverse_dft(&spec);
        assert!((grid.get(CH_R, 0, 0, 0) - 1.0).abs() < 1e-12);
        let total: f64 = grid.channel(CH_R).iter().map(|v| v.abs()).sum();
        assert!((total - 1.0).abs() < 1e-9, "energy must concentrate at the origin");
    }

    #[test]
    fn forward_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = random_grid([4, 4, 4], &mut rng);
        let fast = forward_dft(&grid);
        let slow = direct::forward_dft_direct(&grid);
        assert!(max_abs_diff(&fast.coeffs, &slow.coeffs) < 1e-9);
    }

    #[test]
    fn forward_matches_direct_on_odd_and_prime_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dims in [[5, 3, 7], [2, 5, 1], [7, 7, 2]] {
            let grid = random_grid(dims, &mut rng);
            let fast = forward_dft(&grid);
            let slow = direct::forward_dft_direct(&grid);
            assert!(max_abs_diff(&fast.coeffs, &slow.coeffs) < 1e-9, "dims {dims:?}");
        }
    }

    #[test]
    fn inverse_matches_direct_on_mixed_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dims in [[4, 4, 4], [5, 2, 3]] {
            let spec = random_spectrum(dims, &mut rng);
            let fast = inverse_dft(&spec);
            let slow = direct::inverse_dft_direct(&spec);
            let err = fast
                .data()
                .iter()
                .zip(slow.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "dims {dims:?}");
        }
    }

    #[test]
    fn inverse_of_forward_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = random_grid([6, 5, 4], &mut rng);
        let back = inverse_dft(&forward_dft(&grid));
        let err = grid
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn amplitude_phase_of_known_values() {
        let geom = geometry(2, 1, 1);
        let n = geom.voxel_count();
        let mut coeffs = vec![Complex::new(0.0, 0.0); CHANNELS * n];
        coeffs[0] = Complex::new(1.0, 0.0);
        coeffs[1] = Complex::new(-2.0, 0.0);
        let spec = Spectrum::from_parts(geom, coeffs).unwrap();
        let ap = to_amplitude_phase(&spec);
        assert_eq!(ap.amplitude[0], 1.0);
        assert_eq!(ap.phase[0], 0.0);
        assert_eq!(ap.amplitude[1], 2.0);
        assert_eq!(ap.phase[1], std::f64::consts::PI);
        // Zero coefficient: amplitude 0, phase defined as 0.
        assert_eq!(ap.amplitude[2], 0.0);
        assert_eq!(ap.phase[2], 0.0);
    }

    #[test]
    fn unit_amplitude_zero_phase_recombines_to_one() {
        let geom = geometry(2, 3, 2);
        let n = CHANNELS * geom.voxel_count();
        let ap = AmplitudePhase::new(geom, vec![1.0; n], vec![0.0; n]).unwrap();
        let spec = from_amplitude_phase(&ap).unwrap();
        assert!(spec.coeffs.iter().all(|c| *c == Complex::new(1.0, 0.0)));
    }

    #[test]
    fn recombination_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = random_spectrum([3, 4, 5], &mut rng);
        let ap = to_amplitude_phase(&spec);
        let back = from_amplitude_phase(&ap).unwrap();
        for (orig, rec) in spec.coeffs.iter().zip(&back.coeffs) {
            let scale = orig.norm().max(1e-30);
            assert!((orig - rec).norm() / scale < 1e-12);
        }
    }

    #[test]
    fn phases_stay_in_half_open_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = random_spectrum([4, 3, 2], &mut rng);
        let ap = to_amplitude_phase(&spec);
        for &p in &ap.phase {
            assert!(p > -std::f64::consts::PI && p <= std::f64::consts::PI);
        }
    }

    #[test]
    fn negative_amplitude_rejected() {
        let geom = geometry(1, 1, 1);
        let err = AmplitudePhase::new(geom, vec![1.0, -0.5, 0.0, 0.0], vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, crate::error::Error::InvalidAmplitude { index: 1, .. }));
    }

    #[test]
    fn asymmetric_pair_breaks_conjugate_symmetry() {
        // A phase array that is not odd-symmetric cannot come from real
        // data; the recombined spectrum is finite but loses conjugate
        // symmetry. (Swapping components between two spectra of real
        // grids preserves it, since both inherit the symmetry.)
        let geom = geometry(4, 4, 4);
        let n = geom.voxel_count();
        let amplitude = vec![1.0; CHANNELS * n];
        let mut phase = vec![0.0; CHANNELS * n];
        phase[CH_R * n + 1] = 0.7; // frequency (1, 0, 0) of the R channel
        let mixed = AmplitudePhase::new(geom, amplitude, phase).unwrap();
        let spec = from_amplitude_phase(&mixed).unwrap();
        assert!(spec.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));

        let [w, h, d] = spec.geometry().dims();
        let mut worst = 0.0f64;
        for m in 0..d {
            for l in 0..h {
                for k in 0..w {
                    let mirrored = spec.get(
                        CH_R,
                        (w - k) % w,
                        (h - l) % h,
                        (d - m) % d,
                    );
                    worst = worst.max((spec.get(CH_R, k, l, m) - mirrored.conj()).norm());
                }
            }
        }
        assert!(worst > 1e-6, "expected symmetry violation, worst deviation {worst}");
    }

    #[test]
    fn conjugate_symmetry_holds_for_real_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = forward_dft(&random_grid([5, 4, 3], &mut rng));
        let [w, h, d] = spec.geometry().dims();
        for c in 0..CHANNELS {
            for m in 0..d {
                for l in 0..h {
                    for k in 0..w {
                        let mirrored = spec.get(c, (w - k) % w, (h - l) % h, (d - m) % d);
                        assert!((spec.get(c, k, l, m) - mirrored.conj()).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let grid = random_grid([6, 7, 3], &mut rng);
        let spec = forward_dft(&grid);
        let n = grid.geometry().voxel_count() as f64;
        for c in 0..CHANNELS {
            let spatial: f64 = grid.channel(c).iter().map(|v| v * v).sum();
            let spectral: f64 = spec.channel(c).iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            assert!((spatial - spectral).abs() / spatial.max(1e-30) < 1e-10);
        }
    }

    #[test]
    fn linearity_of_forward_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g1 = random_grid([4, 5, 3], &mut rng);
        let g2 = random_grid([4, 5, 3], &mut rng);
        let (a, b) = (1.75, -0.5);
        let combined_data: Vec<f64> = g1
            .data()
            .iter()
            .zip(g2.data())
            .map(|(x, y)| a * x + b * y)
            .collect();
        let combined = VoxelGrid::from_parts(g1.geometry().clone(), combined_data).unwrap();
        let f_combined = forward_dft(&combined);
        let f1 = forward_dft(&g1);
        let f2 = forward_dft(&g2);
        let err = f_combined
            .coeffs
            .iter()
            .zip(f1.coeffs.iter().zip(&f2.coeffs))
            .map(|(fc, (x, y))| (fc - (x * a + y * b)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn translation_changes_phase_only() {
        let geom = geometry(4, 4, 4);
        let mut at_origin = VoxelGrid::zeros(geom.clone());
        at_origin.set(CH_PI, 0, 0, 0, 1.0);
        let mut shifted = VoxelGrid::zeros(geom);
        shifted.set(CH_PI, 1, 2, 3, 1.0);

        let ap0 = to_amplitude_phase(&forward_dft(&at_origin));
        let ap1 = to_amplitude_phase(&forward_dft(&shifted));
        let amp_err = ap0
            .amplitude
            .iter()
            .zip(&ap1.amplitude)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(amp_err < 1e-9);
        let phase_diff = ap0
            .phase
            .iter()
            .zip(&ap1.phase)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(phase_diff > 1e-3, "translation must show up in the phase");
    }

    #[test]
    fn parallel_and_sequential_paths_are_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        // Large enough to cross the parallel threshold.
        let grid = random_grid([16, 16, 16], &mut rng);

        set_thread_cap(1);
        let sequential = forward_dft(&grid);
        let seq_inverse = inverse_dft(&sequential);
        set_thread_cap(4);
        let parallel = forward_dft(&grid);
        let par_inverse = inverse_dft(&parallel);
        set_thread_cap(0);

        assert_eq!(sequential.coeffs, parallel.coeffs);
        assert_eq!(seq_inverse.data(), par_inverse.data());
    }
}
