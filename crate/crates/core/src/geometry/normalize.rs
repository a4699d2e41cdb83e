use serde::{Deserialize, Serialize};

use super::{Point3, TriangleMesh, Vec3};
use crate::{GifsError, Result};

/// Largest axis extent of a normalized mesh inside the unit cube.
pub const NORMALIZED_EXTENT: f64 = 0.9;

/// Affine map `p' = (p + offset) * scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub scale: f64,
    pub offset: [f64; 3],
}

impl Normalization {
    pub fn identity() -> Self {
        Self { scale: 1.0, offset: [0.0; 3] }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        Point3::from((p.coords + Vec3::from(self.offset)) * self.scale)
    }

    pub fn invert(&self, p: &Point3) -> Point3 {
        Point3::from(p.coords / self.scale - Vec3::from(self.offset))
    }

    pub fn apply_mesh(&self, mesh: &TriangleMesh) -> TriangleMesh {
        TriangleMesh {
            vertices: mesh.vertices.iter().map(|p| self.apply(p)).collect(),
            faces: mesh.faces.clone(),
        }
    }

    pub fn invert_mesh(&self, mesh: &TriangleMesh) -> TriangleMesh {
        TriangleMesh {
            vertices: mesh.vertices.iter().map(|p| self.invert(p)).collect(),
            faces: mesh.faces.clone(),
        }
    }
}

/// Centers the mesh's bounding box at the origin and scales its longest side
/// to [`NORMALIZED_EXTENT`].
pub fn normalize_mesh(mesh: &TriangleMesh) -> Result<(TriangleMesh, Normalization)> {
    if mesh.is_empty() {
        return Err(GifsError::EmptyMesh);
    }
    let bounds = mesh.bounds();
    let extent = bounds.extent().max();
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(GifsError::DegenerateMesh("mesh has zero extent".into()));
    }
    let c = bounds.center();
    let norm = Normalization {
        scale: NORMALIZED_EXTENT / extent,
        offset: [-c.x, -c.y, -c.z],
    };
    Ok((norm.apply_mesh(mesh), norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives::box_mesh;

    #[test]
    fn cube_zero_two() {
        let m = box_mesh(Point3::origin(), Point3::new(2.0, 2.0, 2.0));
        let (n, t) = normalize_mesh(&m).unwrap();
        assert_eq!(t.scale, 0.45);
        assert_eq!(t.offset, [-1.0, -1.0, -1.0]);
        let b = n.bounds();
        assert_eq!(b.min, Point3::new(-0.45, -0.45, -0.45));
        assert_eq!(b.max, Point3::new(0.45, 0.45, 0.45));
    }

    #[test]
    fn already_normalized_is_identity() {
        let m = box_mesh(Point3::new(-0.45, -0.2, -0.1), Point3::new(0.45, 0.2, 0.1));
        let (n, t) = normalize_mesh(&m).unwrap();
        assert!((t.scale - 1.0).abs() < 1e-12);
        for (a, b) in m.vertices.iter().zip(&n.vertices) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_mesh_is_fine_point_mesh_is_not() {
        let flat = TriangleMesh::new(
            vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(normalize_mesh(&flat).is_ok());
        let point = TriangleMesh {
            vertices: vec![Point3::origin(); 3],
            faces: vec![[0, 1, 2]],
        };
        assert!(matches!(normalize_mesh(&point), Err(GifsError::DegenerateMesh(_))));
    }
}
