//! Style-image loading: 8-bit PNG and binary PPM (P6).

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::color_from_u8;
use crate::style::StyleImage;

/// Reads a PNG or binary PPM image into a `[0, 1]` RGB image. Grayscale
/// inputs are replicated across the three channels; alpha is dropped;
/// bit depths other than 8 are rejected.
pub fn read_image(path: impl AsRef<Path>) -> Result<StyleImage> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => read_png(path),
        Some("ppm") => read_ppm(path),
        _ => Err(Error::format(path, "unsupported image extension (expected .png or .ppm)")),
    }
}

fn read_png(path: &Path) -> Result<StyleImage> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    // Expand palettes and sub-byte grayscale to 8 bits; 16-bit data is
    // left alone so it can be rejected below.
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format(path, format!("invalid PNG: {e}")))?;
    let buf_len = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format(path, "PNG dimensions overflow the output buffer"))?;
    let mut buf = vec![0u8; buf_len];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format(path, format!("invalid PNG: {e}")))?;

    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::format(
            path,
            format!("unsupported PNG bit depth {:?} (only 8-bit is supported)", info.bit_depth),
        ));
    }
    let width = info.width as usize;
    let height = info.height as usize;
    let data = &buf[..info.buffer_size()];

    let mut pixels = Vec::with_capacity(width * height * 3);
    match info.color_type {
        png::ColorType::Rgb => {
            pixels.extend(data.iter().map(|&v| color_from_u8(v)));
        }
        png::ColorType::Rgba => {
            for px in data.chunks_exact(4) {
                pixels.extend(px[..3].iter().map(|&v| color_from_u8(v)));
            }
        }
        png::ColorType::Grayscale => {
            for &v in data {
                let c = color_from_u8(v);
                pixels.extend([c, c, c]);
            }
        }
        png::ColorType::GrayscaleAlpha => {
            for px in data.chunks_exact(2) {
                let c = color_from_u8(px[0]);
                pixels.extend([c, c, c]);
            }
        }
        other => {
            return Err(Error::format(path, format!("unsupported PNG color type {other:?}")));
        }
    }
    StyleImage::new(width, height, pixels)
}

fn read_ppm(path: &Path) -> Result<StyleImage> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;

    let mut pos = 0usize;
    let mut next_token = || -> Result<String> {
        // Skip whitespace and '#' comments.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, "truncated PPM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if next_token()? != "P6" {
        return Err(Error::format(path, "not a binary PPM (missing P6 magic)"));
    }
    let parse = |token: String| -> Result<usize> {
        token
            .parse::<usize>()
            .map_err(|_| Error::format(path, format!("invalid PPM header value '{token}'")))
    };
    let width = parse(next_token()?)?;
    let height = parse(next_token()?)?;
    let maxval = parse(next_token()?)?;
    if maxval != 255 {
        return Err(Error::format(
            path,
            format!("unsupported PPM maxval {maxval} (only 8-bit / 255 is supported)"),
        ));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format(path, "missing separator before PPM payload"));
    }
    pos += 1;

    let expected = width * height * 3;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: expected as u64,
            actual: payload.len() as u64,
        });
    }
    let pixels = payload[..expected].iter().map(|&v| color_from_u8(v)).collect();
    StyleImage::new(width, height, pixels)
}
