//! PLY reader and writer for colored vertices.
//!
//! Supported layout: ascii or binary-little-endian files whose vertex
//! element carries `x`, `y`, `z` as 32-bit floats and `red`, `green`,
//! `blue` as 8-bit unsigned integers. Additional scalar vertex properties
//! are skipped; non-vertex elements after the vertex data are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt};

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};
use crate::io::{color_from_u8, color_to_u8};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    Char,
    UChar,
    Short,
    UShort,
    Int,
    UInt,
    Float,
    Double,
}

impl ScalarType {
    fn parse(token: &str) -> Option<ScalarType> {
        Some(match token {
            "char" | "int8" => ScalarType::Char,
            "uchar" | "uint8" => ScalarType::UChar,
            "short" | "int16" => ScalarType::Short,
            "ushort" | "uint16" => ScalarType::UShort,
            "int" | "int32" => ScalarType::Int,
            "uint" | "uint32" => ScalarType::UInt,
            "float" | "float32" => ScalarType::Float,
            "double" | "float64" => ScalarType::Double,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            ScalarType::Char | ScalarType::UChar => 1,
            ScalarType::Short | ScalarType::UShort => 2,
            ScalarType::Int | ScalarType::UInt | ScalarType::Float => 4,
            ScalarType::Double => 8,
        }
    }
}

#[derive(Debug, Clone)]
struct Property {
    name: String,
    scalar: ScalarType,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
    /// List properties have per-row sizes, so elements carrying one
    /// cannot be skipped or parsed as vertices.
    has_list: bool,
}

struct Header {
    format: Format,
    elements: Vec<Element>,
    /// Number of text lines consumed, for error positions.
    lines: usize,
}

fn read_header(reader: &mut impl BufRead, path: &Path) -> Result<Header> {
    let mut line = String::new();
    let mut line_no = 0usize;

    let next_line = |reader: &mut dyn BufRead, line: &mut String, line_no: &mut usize| -> Result<()> {
        line.clear();
        let n = reader.read_line(line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Err(Error::parse(path, *line_no + 1, "unexpected end of file in header"));
        }
        *line_no += 1;
        Ok(())
    };

    next_line(reader, &mut line, &mut line_no)?;
    if line.trim_end() != "ply" {
        return Err(Error::parse(path, 1, "not a PLY file: missing 'ply' magic line"));
    }

    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        next_line(reader, &mut line, &mut line_no)?;
        let trimmed = line.trim_end();
        if trimmed == "end_header" {
            break;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens.first() {
            None | Some(&"comment") | Some(&"obj_info") => continue,
            Some(&"format") => {
                if tokens.len() < 3 {
                    return Err(Error::parse(path, line_no, "malformed format line"));
                }
                format = Some(match tokens[1] {
                    "ascii" => Format::Ascii,
                    "binary_little_endian" => Format::BinaryLittleEndian,
                    other => {
                        return Err(Error::format(
                            path,
                            format!("unsupported PLY format '{other}' (line {line_no})"),
                        ))
                    }
                });
            }
            Some(&"element") => {
                if tokens.len() < 3 {
                    return Err(Error::parse(path, line_no, "malformed element line"));
                }
                let count = tokens[2].parse::<usize>().map_err(|_| {
                    Error::parse(path, line_no, format!("invalid element count '{}'", tokens[2]))
                })?;
                elements.push(Element {
                    name: tokens[1].to_string(),
                    count,
                    properties: Vec::new(),
                    has_list: false,
                });
            }
            Some(&"property") => {
                let element = elements.last_mut().ok_or_else(|| {
                    Error::parse(path, line_no, "property declared before any element")
                })?;
                if tokens.get(1) == Some(&"list") {
                    element.properties.push(Property {
                        name: tokens.last().unwrap_or(&"").to_string(),
                        scalar: ScalarType::Int,
                    });
                    element.has_list = true;
                    continue;
                }
                if tokens.len() < 3 {
                    return Err(Error::parse(path, line_no, "malformed property line"));
                }
                let scalar = ScalarType::parse(tokens[1]).ok_or_else(|| {
                    Error::parse(path, line_no, format!("unknown property type '{}'", tokens[1]))
                })?;
                element.properties.push(Property { name: tokens[2].to_string(), scalar });
            }
            Some(other) => {
                return Err(Error::parse(path, line_no, format!("unknown header keyword '{other}'")));
            }
        }
    }

    let format = format
        .ok_or_else(|| Error::parse(path, line_no, "header ended without a format line"))?;
    Ok(Header { format, elements, lines: line_no })
}

pub fn read(path: &Path) -> Result<PointCloud> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let header = read_header(&mut reader, path)?;

    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::parse(path, header.lines, "no 'vertex' element in header"))?;
    let vertex = &header.elements[vertex_pos];
    if vertex.has_list {
        return Err(Error::format(path, "vertex elements with list properties are unsupported"));
    }

    let column = |name: &str, expected: ScalarType| -> Result<usize> {
        let idx = vertex
            .properties
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::MissingProperty {
                path: path.to_path_buf(),
                property: name.to_string(),
            })?;
        if vertex.properties[idx].scalar != expected {
            return Err(Error::format(
                path,
                format!(
                    "vertex property '{name}' has unsupported type {:?}",
                    vertex.properties[idx].scalar
                ),
            ));
        }
        Ok(idx)
    };
    let col_x = column("x", ScalarType::Float)?;
    let col_y = column("y", ScalarType::Float)?;
    let col_z = column("z", ScalarType::Float)?;
    let col_r = column("red", ScalarType::UChar)?;
    let col_g = column("green", ScalarType::UChar)?;
    let col_b = column("blue", ScalarType::UChar)?;

    // Elements declared before the vertex data have to be walked through.
    for element in &header.elements[..vertex_pos] {
        if element.has_list {
            return Err(Error::format(
                path,
                format!("element '{}' with list properties precedes the vertex data", element.name),
            ));
        }
        match header.format {
            Format::Ascii => {
                let mut line = String::new();
                for _ in 0..element.count {
                    line.clear();
                    reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
                }
            }
            Format::BinaryLittleEndian => {
                let row: usize = element.properties.iter().map(|p| p.scalar.size()).sum();
                let mut skip = vec![0u8; row * element.count];
                reader.read_exact(&mut skip).map_err(|e| Error::io(path, e))?;
            }
        }
    }

    let mut points = Vec::with_capacity(vertex.count);
    match header.format {
        Format::Ascii => {
            let mut line = String::new();
            for row in 0..vertex.count {
                line.clear();
                let line_no = header.lines + row + 1;
                if reader.read_line(&mut line).map_err(|e| Error::io(path, e))? == 0 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected {} vertex rows, file ended at {row}", vertex.count),
                    ));
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() < vertex.properties.len() {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!(
                            "vertex row has {} values, expected {}",
                            tokens.len(),
                            vertex.properties.len()
                        ),
                    ));
                }
                let float = |col: usize| -> Result<f64> {
                    tokens[col].parse::<f32>().map(f64::from).map_err(|_| {
                        Error::parse(path, line_no, format!("invalid float '{}'", tokens[col]))
                    })
                };
                let byte = |col: usize| -> Result<u8> {
                    tokens[col].parse::<u8>().map_err(|_| {
                        Error::parse(path, line_no, format!("invalid color byte '{}'", tokens[col]))
                    })
                };
                let (x, y, z) = (float(col_x)?, float(col_y)?, float(col_z)?);
                if !x.is_finite() || !y.is_finite() || !z.is_finite() {
                    return Err(Error::parse(path, line_no, "non-finite vertex coordinate"));
                }
                points.push(Point::new(
                    x,
                    y,
                    z,
                    color_from_u8(byte(col_r)?),
                    color_from_u8(byte(col_g)?),
                    color_from_u8(byte(col_b)?),
                ));
            }
        }
        Format::BinaryLittleEndian => {
            for row in 0..vertex.count {
                let mut x = 0.0f64;
                let mut y = 0.0f64;
                let mut z = 0.0f64;
                let mut rgb = [0u8; 3];
                for (col, property) in vertex.properties.iter().enumerate() {
                    let is_coord = col == col_x || col == col_y || col == col_z;
                    let is_color = col == col_r || col == col_g || col == col_b;
                    if is_coord {
                        let v = reader
                            .read_f32::<LittleEndian>()
                            .map_err(|e| Error::io(path, e))? as f64;
                        if col == col_x {
                            x = v;
                        } else if col == col_y {
                            y = v;
                        } else {
                            z = v;
                        }
                    } else if is_color {
                        let v = reader.read_u8().map_err(|e| Error::io(path, e))?;
                        if col == col_r {
                            rgb[0] = v;
                        } else if col == col_g {
                            rgb[1] = v;
                        } else {
                            rgb[2] = v;
                        }
                    } else {
                        let mut skip = vec![0u8; property.scalar.size()];
                        reader.read_exact(&mut skip).map_err(|e| Error::io(path, e))?;
                    }
                }
                if !x.is_finite() || !y.is_finite() || !z.is_finite() {
                    return Err(Error::parse(
                        path,
                        header.lines + row + 1,
                        format!("non-finite coordinate in binary vertex {row}"),
                    ));
                }
                points.push(Point::new(
                    x,
                    y,
                    z,
                    color_from_u8(rgb[0]),
                    color_from_u8(rgb[1]),
                    color_from_u8(rgb[2]),
                ));
            }
        }
    }

    if points.is_empty() {
        return Err(Error::parse(path, header.lines, "vertex element declares zero vertices"));
    }
    PointCloud::new(points)
}

pub fn write(cloud: &PointCloud, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let inner = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "ply")?;
        writeln!(w, "format ascii 1.0")?;
        writeln!(w, "element vertex {}", cloud.len())?;
        writeln!(w, "property float x")?;
        writeln!(w, "property float y")?;
        writeln!(w, "property float z")?;
        writeln!(w, "property uchar red")?;
        writeln!(w, "property uchar green")?;
        writeln!(w, "property uchar blue")?;
        writeln!(w, "end_header")?;
        for p in cloud {
            writeln!(
                w,
                "{} {} {} {} {} {}",
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
