//! Property tests for the voxelization and transform invariants.

use proptest::prelude::*;

use spectral_pcd::spectral::interpolate_amplitude;
use spectral_pcd::transform::forward_dft;
use spectral_pcd::voxel::{
    compute_geometry, devoxelize, voxelize, voxelize_with_stats, GridGeometry, VoxelGrid, CHANNELS,
};
use spectral_pcd::{Point, PointCloud};

fn arb_point() -> impl Strategy<Value = Point> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
    )
        .prop_map(|(x, y, z, r, g, b)| Point::new(x, y, z, r, g, b))
}

fn arb_cloud(max_points: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(arb_point(), 1..=max_points)
        .prop_map(|points| PointCloud::new(points).expect("generated points are valid"))
}

fn arb_dims() -> impl Strategy<Value = [usize; 3]> {
    [1usize..=6, 1usize..=6, 1usize..=6]
}

fn arb_grid() -> impl Strategy<Value = VoxelGrid> {
    arb_dims().prop_flat_map(|dims| {
        let n = CHANNELS * dims[0] * dims[1] * dims[2];
        prop::collection::vec(0.0f64..1.0, n).prop_map(move |data| {
            let geom = GridGeometry::from_bounds(
                [0.0; 3],
                [dims[0] as f64, dims[1] as f64, dims[2] as f64],
                1.0,
            )
            .unwrap();
            VoxelGrid::from_parts(geom, data).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Every reconstructed point sits within half a voxel diagonal of some
    // original point.
    #[test]
    fn round_trip_containment(cloud in arb_cloud(64), v in 0.05f64..1.0) {
        let geom = compute_geometry(&cloud, v).unwrap();
        let grid = voxelize(&cloud, &geom).unwrap();
        let back = devoxelize(&grid).unwrap();
        let bound = v * 3.0f64.sqrt() / 2.0 + 1e-9;
        for q in &back {
            let nearest = cloud
                .iter()
                .map(|p| {
                    let dx = p.x - q.x;
                    let dy = p.y - q.y;
                    let dz = p.z - q.z;
                    (dx * dx + dy * dy + dz * dz).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= bound, "distance {nearest} exceeds {bound}");
        }
    }

    // Occupied voxels never outnumber points, and equality holds exactly
    // when no collisions occur.
    #[test]
    fn occupancy_count_bounded_by_points(cloud in arb_cloud(48), v in 0.05f64..1.0) {
        let geom = compute_geometry(&cloud, v).unwrap();
        let (grid, stats) = voxelize_with_stats(&cloud, &geom).unwrap();
        prop_assert!(grid.occupied_count() <= cloud.len());
        prop_assert_eq!(grid.occupied_count() + stats.collisions, cloud.len());
    }

    // Shuffling a collision-free cloud yields a bit-identical grid.
    #[test]
    fn voxelization_is_permutation_invariant(cloud in arb_cloud(48), v in 0.05f64..1.0, seed in any::<u64>()) {
        let geom = compute_geometry(&cloud, v).unwrap();
        let (grid, stats) = voxelize_with_stats(&cloud, &geom).unwrap();
        prop_assume!(stats.collisions == 0);

        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = cloud.points().to_vec();
        shuffled.shuffle(&mut rng);
        let shuffled = PointCloud::new(shuffled).unwrap();
        let shuffled_grid = voxelize(&shuffled, &geom).unwrap();
        prop_assert_eq!(grid, shuffled_grid);
    }

    // Parseval: spatial and spectral energy agree per channel.
    #[test]
    fn parseval_identity(grid in arb_grid()) {
        let spec = forward_dft(&grid);
        let n = grid.geometry().voxel_count() as f64;
        for c in 0..CHANNELS {
            let spatial: f64 = grid.channel(c).iter().map(|x| x * x).sum();
            let spectral: f64 = spec.channel(c).iter().map(|x| x.norm_sqr()).sum::<f64>() / n;
            prop_assert!((spatial - spectral).abs() <= 1e-10 * spatial.max(1.0));
        }
    }

    // Spectra of real grids are conjugate-symmetric.
    #[test]
    fn conjugate_symmetry_of_real_data(grid in arb_grid()) {
        let spec = forward_dft(&grid);
        let [w, h, d] = grid.geometry().dims();
        for c in 0..CHANNELS {
            for m in 0..d {
                for l in 0..h {
                    for k in 0..w {
                        let mirrored = spec.get(c, (w - k) % w, (h - l) % h, (d - m) % d);
                        prop_assert!((spec.get(c, k, l, m) - mirrored.conj()).norm() <= 1e-9);
                    }
                }
            }
        }
    }

    // Interpolated amplitudes stay inside the elementwise envelope.
    #[test]
    fn interpolation_bounded_by_inputs(
        pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..64),
        gamma in 0.0f64..=1.0,
    ) {
        let a: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
        let b: Vec<f64> = pairs.iter().map(|&(_, y)| y).collect();
        let out = interpolate_amplitude(&a, &b, gamma).unwrap();
        for ((&x, &y), &o) in a.iter().zip(&b).zip(&out) {
            prop_assert!(o >= x.min(y) - 1e-12);
            prop_assert!(o <= x.max(y) + 1e-12);
            prop_assert!(o >= 0.0);
        }
    }
}
