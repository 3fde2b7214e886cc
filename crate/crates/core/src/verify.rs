//! Self-checks runnable from the CLI: the fast transform against the
//! direct-summation route, the Parseval identity, lossless round trips,
//! and the swap/interpolation invariants.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cloud::{Point, PointCloud};
use crate::error::Error;
use crate::spectral::{
    amplitude_swap, decompose, interpolate_amplitude, phase_swap, reconstruct, ChannelMode,
    ReconstructionParams,
};
use crate::transform::{direct, forward_dft, inverse_dft, Spectrum};
use crate::voxel::{compute_geometry, devoxelize, voxelize, GridGeometry, VoxelGrid, CHANNELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifySize {
    /// Reduced grid range and fewer samples; finishes in seconds.
    Small,
    /// The full grid range the acceptance criteria require.
    Full,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub size: VerifySize,
    /// Test hook: absolute perturbation injected into the fast transform's
    /// output before it is compared against the direct route. Any value
    /// beyond the tolerance must make the oracle checks fail.
    pub fft_perturbation: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { size: VerifySize::Full, fft_perturbation: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn geometry(dims: [usize; 3]) -> GridGeometry {
    GridGeometry::from_bounds([0.0; 3], [dims[0] as f64, dims[1] as f64, dims[2] as f64], 1.0)
        .expect("static bounds are valid")
}

fn random_grid(dims: [usize; 3], rng: &mut ChaCha8Rng) -> VoxelGrid {
    let geom = geometry(dims);
    let data = (0..CHANNELS * geom.voxel_count())
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    VoxelGrid::from_parts(geom, data).expect("length matches by construction")
}

fn random_spectrum(dims: [usize; 3], rng: &mut ChaCha8Rng) -> Spectrum {
    let geom = geometry(dims);
    let coeffs = (0..CHANNELS * geom.voxel_count())
        .map(|_| {
            num_complex::Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .collect();
    Spectrum::from_parts(geom, coeffs).expect("length matches by construction")
}

fn random_cloud(n: usize, rng: &mut ChaCha8Rng) -> PointCloud {
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
    PointCloud::new(points).expect("generated points are valid")
}

/// Runs the whole suite and reports one result per check.
pub fn run(options: &VerifyOptions) -> VerifyReport {
    let max_dim = match options.size {
        VerifySize::Small => 5,
        VerifySize::Full => 8,
    };
    let checks = vec![
        check_forward_oracle(max_dim, options.fft_perturbation),
        check_inverse_oracle(max_dim, options.fft_perturbation),
        check_parseval(options.size),
        check_round_trip(options.size),
        check_involutions(),
        check_interpolation(),
    ];
    VerifyReport { checks }
}

fn check_forward_oracle(max_dim: usize, perturbation: f64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0);
    let mut worst = 0.0f64;
    for w in 1..=max_dim {
        for h in 1..=max_dim {
            for d in 1..=max_dim {
                let grid = random_grid([w, h, d], &mut rng);
                let mut fast = forward_dft(&grid);
                fast.coeffs[0] += perturbation;
                let slow = direct::forward_dft_direct(&grid);
                let err = fast
                    .coeffs
                    .iter()
                    .zip(&slow.coeffs)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                worst = worst.max(err);
            }
        }
    }
    CheckResult {
        name: "fft_forward_vs_direct",
        passed: worst <= 1e-9,
        detail: format!("max abs error {worst:.3e} over dims 1..={max_dim} (tolerance 1e-9)"),
    }
}

fn check_inverse_oracle(max_dim: usize, perturbation: f64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1);
    let mut worst = 0.0f64;
    for w in 1..=max_dim {
        for h in 1..=max_dim {
            for d in 1..=max_dim {
                let spec = random_spectrum([w, h, d], &mut rng);
                let fast = inverse_dft(&spec);
                let slow = direct::inverse_dft_direct(&spec);
                let err = fast
                    .data()
                    .iter()
                    .zip(slow.data())
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let a = if i == 0 { a + perturbation } else { *a };
                        (a - b).abs()
                    })
                    .fold(0.0, f64::max);
                worst = worst.max(err);
            }
        }
    }
    CheckResult {
        name: "fft_inverse_vs_direct",
        passed: worst <= 1e-9,
        detail: format!("max abs error {worst:.3e} over dims 1..={max_dim} (tolerance 1e-9)"),
    }
}

fn check_parseval(size: VerifySize) -> CheckResult {
    let samples = match size {
        VerifySize::Small => 10,
        VerifySize::Full => 50,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xF2);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let dims = [
            rng.random_range(1..=12),
            rng.random_range(1..=12),
            rng.random_range(1..=12),
        ];
        let grid = random_grid(dims, &mut rng);
        let spec = forward_dft(&grid);
        let n = grid.geometry().voxel_count() as f64;
        for c in 0..CHANNELS {
            let spatial: f64 = grid.channel(c).iter().map(|v| v * v).sum();
            let spectral: f64 = spec.channel(c).iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            worst = worst.max((spatial - spectral).abs() / spatial.max(1e-30));
        }
    }
    CheckResult {
        name: "parseval_identity",
        passed: worst <= 1e-10,
        detail: format!("max relative error {worst:.3e} over {samples} grids (tolerance 1e-10)"),
    }
}

fn check_round_trip(size: VerifySize) -> CheckResult {
    let (clouds, points, v) = match size {
        VerifySize::Small => (3, 256, 0.25),
        VerifySize::Full => (5, 1024, 0.125),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xF3);
    for i in 0..clouds {
        let cloud = random_cloud(points, &mut rng);
        let ap = match decompose(&cloud, v) {
            Ok(ap) => ap,
            Err(e) => return round_trip_failure(i, e),
        };
        let rebuilt = match reconstruct(&ap, &ReconstructionParams::default()) {
            Ok(c) => c,
            Err(e) => return round_trip_failure(i, e),
        };
        let geom = compute_geometry(&cloud, v).expect("voxel size is positive");
        let grid = voxelize(&cloud, &geom).expect("points are inside their own bounds");
        let expected = devoxelize(&grid).expect("at least one occupied voxel");
        if rebuilt.len() != expected.len() {
            return CheckResult {
                name: "decompose_reconstruct_round_trip",
                passed: false,
                detail: format!(
                    "cloud {i}: {} reconstructed points, {} expected",
                    rebuilt.len(),
                    expected.len()
                ),
            };
        }
        for (a, b) in rebuilt.iter().zip(expected.iter()) {
            let color_err = a
                .color()
                .into_iter()
                .zip(b.color())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if a.position() != b.position() || color_err > 1e-6 {
                return CheckResult {
                    name: "decompose_reconstruct_round_trip",
                    passed: false,
                    detail: format!("cloud {i}: voxel set or colors diverged ({color_err:.3e})"),
                };
            }
        }
    }
    CheckResult {
        name: "decompose_reconstruct_round_trip",
        passed: true,
        detail: format!("{clouds} clouds reproduced exactly (colors within 1e-6)"),
    }
}

fn round_trip_failure(index: usize, error: Error) -> CheckResult {
    CheckResult {
        name: "decompose_reconstruct_round_trip",
        passed: false,
        detail: format!("cloud {index}: {error}"),
    }
}

fn check_involutions() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF4);
    let a = random_cloud(120, &mut rng);
    let b = random_cloud(150, &mut rng);
    let geom = crate::voxel::compute_shared_geometry(&a, &b, 0.25).expect("positive voxel size");
    let ap_a = crate::spectral::decompose_with_geometry(&a, &geom).expect("decompose");
    let ap_b = crate::spectral::decompose_with_geometry(&b, &geom).expect("decompose");

    let mut passed = true;
    let mut failures = Vec::new();
    for mode in [ChannelMode::All, ChannelMode::RgbOnly] {
        let (s1, s2) = amplitude_swap(&ap_a, &ap_b, mode).expect("shapes match");
        let (r1, r2) = amplitude_swap(&s1, &s2, mode).expect("shapes match");
        if r1 != ap_a || r2 != ap_b {
            passed = false;
            failures.push(format!("amplitude_swap ({mode:?}) is not an involution"));
        }
    }
    let (p1, p2) = phase_swap(&ap_a, &ap_b).expect("shapes match");
    let (q1, q2) = phase_swap(&p1, &p2).expect("shapes match");
    if q1 != ap_a || q2 != ap_b {
        passed = false;
        failures.push("phase_swap is not an involution".to_string());
    }
    let (i1, i2) = amplitude_swap(&ap_a, &ap_a, ChannelMode::All).expect("shapes match");
    if i1 != ap_a || i2 != ap_a {
        passed = false;
        failures.push("self-swap is not the identity".to_string());
    }
    CheckResult {
        name: "swap_involutions",
        passed,
        detail: if passed { "bit-exact".to_string() } else { failures.join("; ") },
    }
}

fn check_interpolation() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF5);
    let a: Vec<f64> = (0..256).map(|_| rng.random_range(0.0..4.0)).collect();
    let b: Vec<f64> = (0..256).map(|_| rng.random_range(0.0..4.0)).collect();
    let lo = interpolate_amplitude(&a, &b, 0.0).expect("gamma in range");
    let hi = interpolate_amplitude(&a, &b, 1.0).expect("gamma in range");
    if lo != a || hi != b {
        return CheckResult {
            name: "interpolation_endpoints",
            passed: false,
            detail: "endpoints are not bit-exact".to_string(),
        };
    }
    let mut worst = 0.0f64;
    for gamma in [0.25, 0.5, 0.75] {
        let mid = interpolate_amplitude(&a, &b, gamma).expect("gamma in range");
        for ((&x, &y), &m) in a.iter().zip(&b).zip(&mid) {
            let expected = (1.0 - gamma) * x + gamma * y;
            worst = worst.max((m - expected).abs());
        }
    }
    CheckResult {
        name: "interpolation_endpoints",
        passed: worst <= 1e-12,
        detail: format!("endpoints bit-exact, linearity deviation {worst:.3e}"),
    }
}
