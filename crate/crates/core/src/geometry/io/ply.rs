use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::geometry::{Point3, TriangleMesh};
use crate::{GifsError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            other => return Err(GifsError::FormatError(format!("unknown PLY type {other}"))),
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read<R: Read>(self, r: &mut R) -> Result<f64> {
        let mut buf = [0u8; 8];
        let n = self.size();
        r.read_exact(&mut buf[..n]).map_err(truncated)?;
        Ok(match self {
            Scalar::I8 => buf[0] as i8 as f64,
            Scalar::U8 => buf[0] as f64,
            Scalar::I16 => i16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([buf[0], buf[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(buf),
        })
    }
}

#[derive(Debug)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

fn truncated(e: std::io::Error) -> GifsError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        GifsError::TruncatedFile("PLY body ended early".into())
    } else {
        GifsError::Io(e)
    }
}

pub fn read_ply(path: &Path) -> Result<TriangleMesh> {
    parse_ply(BufReader::new(File::open(path)?))
}

/// Binary little-endian PLY with a `vertex` element (x, y, z) and a `face`
/// element carrying a `vertex_indices` (or `vertex_index`) list. Polygons are
/// fan-triangulated; other elements and properties are skipped.
pub fn parse_ply<R: Read>(mut reader: BufReader<R>) -> Result<TriangleMesh> {
    let mut line = String::new();
    let next_line = |reader: &mut BufReader<R>, line: &mut String| -> Result<()> {
        line.clear();
        if reader.read_line(line)? == 0 {
            return Err(GifsError::TruncatedFile("PLY header ended early".into()));
        }
        Ok(())
    };
    next_line(&mut reader, &mut line)?;
    if line.trim_end() != "ply" {
        return Err(GifsError::FormatError("missing 'ply' magic".into()));
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut format_ok = false;
    loop {
        next_line(&mut reader, &mut line)?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["format", "binary_little_endian", "1.0"] => format_ok = true,
            ["format", other, ..] => {
                return Err(GifsError::FormatError(format!("unsupported PLY format {other}")))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| GifsError::FormatError(format!("bad element count {count}")))?,
                properties: Vec::new(),
            }),
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| GifsError::FormatError("property before element".into()))?;
                el.properties.push(Property::List {
                    name: name.to_string(),
                    count: Scalar::parse(count)?,
                    item: Scalar::parse(item)?,
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| GifsError::FormatError("property before element".into()))?;
                el.properties.push(Property::Scalar {
                    name: name.to_string(),
                    ty: Scalar::parse(ty)?,
                });
            }
            ["end_header"] => break,
            _ => return Err(GifsError::FormatError(format!("bad PLY header line {:?}", line.trim_end()))),
        }
    }
    if !format_ok {
        return Err(GifsError::FormatError("PLY format line missing".into()));
    }

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [0.0f64; 3];
            for prop in &el.properties {
                match prop {
                    Property::Scalar { name, ty } => {
                        let v = ty.read(&mut reader)?;
                        if el.name == "vertex" {
                            match name.as_str() {
                                "x" => xyz[0] = v,
                                "y" => xyz[1] = v,
                                "z" => xyz[2] = v,
                                _ => {}
                            }
                        }
                    }
                    Property::List { name, count, item } => {
                        let n = count.read(&mut reader)? as usize;
                        let mut idx = Vec::with_capacity(n);
                        for _ in 0..n {
                            idx.push(item.read(&mut reader)?);
                        }
                        if el.name == "face" && (name == "vertex_indices" || name == "vertex_index") {
                            if n < 3 {
                                return Err(GifsError::FormatError("face with fewer than 3 vertices".into()));
                            }
                            if idx.iter().any(|&i| i < 0.0) {
                                return Err(GifsError::FormatError("negative face index".into()));
                            }
                            for k in 1..n - 1 {
                                faces.push([idx[0] as u32, idx[k] as u32, idx[k + 1] as u32]);
                            }
                        }
                    }
                }
            }
            if el.name == "vertex" {
                vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
            }
        }
    }
    TriangleMesh::new(vertices, faces).map_err(|e| GifsError::FormatError(e.to_string()))
}

pub fn write_ply(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ply_to(&mut w, mesh)?;
    w.flush()?;
    Ok(())
}

/// Doubles for coordinates, `uchar`/`int` face lists.
pub fn write_ply_to<W: Write>(w: &mut W, mesh: &TriangleMesh) -> Result<()> {
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    )?;
    for v in &mesh.vertices {
        for c in [v.x, v.y, v.z] {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    for f in &mesh.faces {
        w.write_all(&[3u8])?;
        for &i in f {
            w.write_all(&(i as i32).to_le_bytes())?;
        }
    }
    Ok(())
}
