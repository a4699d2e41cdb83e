//! Mesh file formats: Wavefront OBJ and binary little-endian PLY.

mod obj;
mod ply;

use std::path::Path;

pub use obj::{read_obj, write_obj};
pub use ply::{read_ply, write_ply};

use super::TriangleMesh;
use crate::{GifsError, Result};

/// Reads a mesh, picking the format from the file extension.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    match extension(path).as_deref() {
        Some("obj") => read_obj(path),
        Some("ply") => read_ply(path),
        _ => Err(GifsError::FormatError(format!(
            "unsupported mesh extension: {}",
            path.display()
        ))),
    }
}

/// Writes a mesh, picking the format from the file extension.
pub fn write_mesh(path: impl AsRef<Path>, mesh: &TriangleMesh) -> Result<()> {
    let path = path.as_ref();
    match extension(path).as_deref() {
        Some("obj") => write_obj(path, mesh),
        Some("ply") => write_ply(path, mesh),
        _ => Err(GifsError::FormatError(format!(
            "unsupported mesh extension: {}",
            path.display()
        ))),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}
