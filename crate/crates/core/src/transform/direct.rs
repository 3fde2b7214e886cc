//! Literal triple-sum evaluation of the 3D DFT, O(N^2) per channel.
//!
//! This path is the ground truth the fast transform is checked against; it
//! shares no code with the FFT route beyond the container types.

use num_complex::Complex;

use crate::transform::Spectrum;
use crate::voxel::{VoxelGrid, CHANNELS};

/// `exp(sign * 2*pi*i * j / n)` for `j` in `0..n`.
fn twiddle_table(n: usize, sign: f64) -> Vec<Complex<f64>> {
    (0..n)
        .map(|j| {
            let angle = sign * 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            Complex::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Forward transform by direct summation:
/// `F(k,l,m) = sum f(x,y,z) * exp(-2*pi*i*(kx/W + ly/H + mz/D))`.
pub fn forward_dft_direct(grid: &VoxelGrid) -> Spectrum {
    let geometry = grid.geometry().clone();
    let [w, h, d] = geometry.dims();
    let n = geometry.voxel_count();
    let tw_x = twiddle_table(w, -1.0);
    let tw_y = twiddle_table(h, -1.0);
    let tw_z = twiddle_table(d, -1.0);

    let mut coeffs = vec![Complex::new(0.0, 0.0); CHANNELS * n];
    for c in 0..CHANNELS {
        let values = grid.channel(c);
        let out = &mut coeffs[c * n..(c + 1) * n];
        for m in 0..d {
            for l in 0..h {
                for k in 0..w {
                    let mut acc = Complex::new(0.0, 0.0);
                    for z in 0..d {
                        for y in 0..h {
                            for x in 0..w {
                                let f = values[(z * h + y) * w + x];
                                if f == 0.0 {
                                    continue;
                                }
                                let tw = tw_x[(k * x) % w] * tw_y[(l * y) % h] * tw_z[(m * z) % d];
                                acc += tw * f;
                            }
                        }
                    }
                    out[(m * h + l) * w + k] = acc;
                }
            }
        }
    }
    Spectrum { geometry, coeffs }
}

/// Inverse transform by direct summation with `1/(W*H*D)` normalization;
/// the imaginary residue is discarded.
pub fn inverse_dft_direct(spectrum: &Spectrum) -> VoxelGrid {
    let geometry = spectrum.geometry().clone();
    let [w, h, d] = geometry.dims();
    let n = geometry.voxel_count();
    let tw_x = twiddle_table(w, 1.0);
    let tw_y = twiddle_table(h, 1.0);
    let tw_z = twiddle_table(d, 1.0);
    let scale = 1.0 / n as f64;

    let mut data = vec![0.0f64; CHANNELS * n];
    for c in 0..CHANNELS {
        let coeffs = spectrum.channel(c);
        let out = &mut data[c * n..(c + 1) * n];
        for z in 0..d {
            for y in 0..h {
                for x in 0..w {
                    let mut acc = Complex::new(0.0, 0.0);
                    for m in 0..d {
                        for l in 0..h {
                            for k in 0..w {
                                let coeff = coeffs[(m * h + l) * w + k];
                                let tw = tw_x[(k * x) % w] * tw_y[(l * y) % h] * tw_z[(m * z) % d];
                                acc += coeff * tw;
                            }
                        }
                    }
                    out[(z * h + y) * w + x] = acc.re * scale;
                }
            }
        }
    }
    VoxelGrid::from_parts(geometry, data).expect("direct inverse preserves shape")
}
