//! CSV point clouds: a `x,y,z,r,g,b` header followed by one row per
//! point, colors on the 0-255 scale.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};
use crate::io::color_to_u8;

const HEADER: [&str; 6] = ["x", "y", "z", "r", "g", "b"];

pub fn read(path: &Path) -> Result<PointCloud> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let columns: Vec<String> = header
        .split(',')
        .map(|t| t.trim().to_ascii_lowercase())
        .collect();
    if columns != HEADER {
        return Err(Error::parse(
            path,
            1,
            format!("expected header 'x,y,z,r,g,b', got '{}'", header.trim()),
        ));
    }

    let mut points = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 6];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|_| {
                Error::parse(path, line_no, format!("invalid number '{field}'"))
            })?;
        }
        if values[..3].iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(path, line_no, "non-finite coordinate"));
        }
        for &c in &values[3..] {
            if !(0.0..=255.0).contains(&c) {
                return Err(Error::parse(path, line_no, format!("color {c} outside 0-255")));
            }
        }
        points.push(Point::new(
            values[0],
            values[1],
            values[2],
            values[3] / 255.0,
            values[4] / 255.0,
            values[5] / 255.0,
        ));
    }

    if points.is_empty() {
        return Err(Error::parse(path, 1, "no data rows"));
    }
    PointCloud::new(points)
}

pub fn write(cloud: &PointCloud, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let inner = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "x,y,z,r,g,b")?;
        for p in cloud {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.x as f32,
                p.y as f32,
                p.z as f32,
                color_to_u8(p.r),
                color_to_u8(p.g),
                color_to_u8(p.b),
            )?;
        }
        w.flush()
    };
    inner(&mut w).map_err(|e| Error::io(path, e))
}
