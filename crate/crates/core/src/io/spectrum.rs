//! Binary container for amplitude/phase pairs.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        4 bytes  "SPCF"
//! version      1 byte   (1)
//! bounds       6 x f64  x_min, y_min, z_min, x_max, y_max, z_max
//! voxel size   f64
//! dimensions   3 x u32  W, H, D
//! convention   1 byte   0 = unnormalized forward / (1/WHD) inverse
//! payload      2 x 4 x W*H*D x f64: amplitude then phase,
//!              channel-major (R, G, B, occupancy), x fastest
//! ```
//!
//! The convention byte keeps spectra written under a different transform
//! normalization from being misread silently.

use std::fs::File;
use std::io::{BufWriter, Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::transform::AmplitudePhase;
use crate::voxel::{GridGeometry, CHANNELS};

const MAGIC: [u8; 4] = *b"SPCF";
const VERSION: u8 = 1;
/// The only normalization convention this build produces and accepts.
pub const NORMALIZATION_UNNORMALIZED_FORWARD: u8 = 0;

const HEADER_LEN: u64 = 4 + 1 + 6 * 8 + 8 + 3 * 4 + 1;

pub fn write_spectrum(ap: &AmplitudePhase, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let geometry = ap.geometry();

    let inner = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_u8(VERSION)?;
        for v in geometry.mins() {
            w.write_f64::<LittleEndian>(v)?;
        }
        for v in geometry.maxs() {
            w.write_f64::<LittleEndian>(v)?;
        }
        w.write_f64::<LittleEndian>(geometry.voxel_size())?;
        for d in geometry.dims() {
            w.write_u32::<LittleEndian>(d as u32)?;
        }
        w.write_u8(NORMALIZATION_UNNORMALIZED_FORWARD)?;
        for &a in ap.amplitude() {
            w.write_f64::<LittleEndian>(a)?;
        }
        for &p in ap.phase() {
            w.write_f64::<LittleEndian>(p)?;
        }
        w.flush()
    };
    inner(&mut w).map_err(|e| Error::io(path, e))
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<AmplitudePhase> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let actual_len = bytes.len() as u64;
    if actual_len < HEADER_LEN {
        return Err(Error::Truncated { path: path.to_path_buf(), expected: HEADER_LEN, actual: actual_len });
    }

    let mut r = Cursor::new(bytes);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if magic != MAGIC {
        return Err(Error::format(path, format!("bad magic {magic:?}, expected \"SPCF\"")));
    }
    let version = r.read_u8().map_err(|e| Error::io(path, e))?;
    if version != VERSION {
        return Err(Error::format(path, format!("unsupported spectrum version {version}")));
    }

    let mut mins = [0.0f64; 3];
    let mut maxs = [0.0f64; 3];
    for v in &mut mins {
        *v = r.read_f64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
    }
    for v in &mut maxs {
        *v = r.read_f64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
    }
    let voxel_size = r.read_f64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = r.read_u32::<LittleEndian>().map_err(|e| Error::io(path, e))? as usize;
    }
    let convention = r.read_u8().map_err(|e| Error::io(path, e))?;
    if convention != NORMALIZATION_UNNORMALIZED_FORWARD {
        return Err(Error::ConventionMismatch {
            path: path.to_path_buf(),
            found: convention,
            expected: NORMALIZATION_UNNORMALIZED_FORWARD,
        });
    }

    let geometry = GridGeometry::from_bounds(mins, maxs, voxel_size)?;
    if geometry.dims() != dims {
        return Err(Error::format(
            path,
            format!(
                "declared dimensions {}x{}x{} violate the geometry invariant \
                 (bounds and voxel size imply {})",
                dims[0], dims[1], dims[2], geometry
            ),
        ));
    }

    let n = geometry.voxel_count();
    let payload = 2 * CHANNELS * n;
    let expected_len = HEADER_LEN + payload as u64 * 8;
    if actual_len != expected_len {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: expected_len,
            actual: actual_len,
        });
    }

    let mut amplitude = vec![0.0f64; CHANNELS * n];
    let mut phase = vec![0.0f64; CHANNELS * n];
    for v in &mut amplitude {
        *v = r.read_f64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
    }
    for v in &mut phase {
        *v = r.read_f64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
    }
    AmplitudePhase::new(geometry, amplitude, phase)
}
