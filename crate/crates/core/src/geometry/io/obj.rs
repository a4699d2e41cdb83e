use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::geometry::{Point3, TriangleMesh};
use crate::{GifsError, Result};

pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    parse_obj(BufReader::new(File::open(path)?))
}

/// Parses `v` and `f` records; polygons are fan-triangulated, other records
/// are ignored.
pub fn parse_obj<R: Read>(reader: BufReader<R>) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| GifsError::FormatError(format!("line {}: {e}", lineno + 1)))?;
                if coords.len() != 3 {
                    return Err(GifsError::FormatError(format!(
                        "line {}: vertex needs 3 coordinates",
                        lineno + 1
                    )));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = tokens
                    .map(|t| resolve_index(t, vertices.len(), lineno + 1))
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(GifsError::FormatError(format!(
                        "line {}: face needs at least 3 vertices",
                        lineno + 1
                    )));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, faces)
}

fn resolve_index(token: &str, nverts: usize, lineno: usize) -> Result<u32> {
    let first = token.split('/').next().unwrap_or("");
    let raw: i64 = first
        .parse()
        .map_err(|_| GifsError::FormatError(format!("line {lineno}: bad face index {token:?}")))?;
    let zero_based = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        nverts as i64 + raw
    } else {
        -1
    };
    if zero_based < 0 || zero_based >= nverts as i64 {
        return Err(GifsError::FormatError(format!(
            "line {lineno}: face index {raw} out of range"
        )));
    }
    Ok(zero_based as u32)
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_obj_to(&mut w, mesh)?;
    w.flush()?;
    Ok(())
}

/// Coordinates are written in shortest round-trip form, so reading back
/// reproduces them bit for bit.
pub fn write_obj_to<W: Write>(w: &mut W, mesh: &TriangleMesh) -> Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {:?} {:?} {:?}", v.x, v.y, v.z)?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<TriangleMesh> {
        parse_obj(BufReader::new(s.as_bytes()))
    }

    #[test]
    fn quads_are_fanned_and_slashes_ignored() {
        let m = parse("# comment\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n").unwrap();
        assert_eq!(m.faces, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn negative_indices_are_relative() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(m.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn bad_records_are_format_errors() {
        assert!(matches!(parse("v 0 0\n"), Err(GifsError::FormatError(_))));
        assert!(matches!(parse("v 0 0 0\nf 1 2 3\n"), Err(GifsError::FormatError(_))));
        assert!(matches!(parse("v a b c\n"), Err(GifsError::FormatError(_))));
    }

    #[test]
    fn write_read_is_exact() {
        let m = TriangleMesh::new(
            vec![
                Point3::new(0.1, 1.0 / 3.0, -2.5e-17),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, std::f64::consts::PI, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_obj_to(&mut buf, &m).unwrap();
        assert_eq!(parse_obj(BufReader::new(buf.as_slice())).unwrap(), m);
    }
}
