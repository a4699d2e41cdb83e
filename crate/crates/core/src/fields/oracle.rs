use super::PairField;
use crate::geometry::{ground_truth_flag, ground_truth_udf, Bvh, Point3, TriangleMesh};
use crate::Result;

/// Exact field of a triangle mesh: flags by segment intersection, distances
/// by closest point.
#[derive(Clone, Debug)]
pub struct MeshOracleField {
    mesh: TriangleMesh,
    bvh: Bvh,
}

impl MeshOracleField {
    pub fn new(mesh: TriangleMesh) -> Result<Self> {
        mesh.validate()?;
        let bvh = Bvh::build(&mesh)?;
        Ok(Self { mesh, bvh })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub fn exact_flag(&self, p1: &Point3, p2: &Point3) -> u8 {
        ground_truth_flag(&self.bvh, &self.mesh, p1, p2)
    }
}

impl PairField for MeshOracleField {
    fn flag(&self, p1: &Point3, p2: &Point3) -> f64 {
        self.exact_flag(p1, p2) as f64
    }

    fn udf(&self, p: &Point3) -> f64 {
        ground_truth_udf(&self.bvh, &self.mesh, p)
    }
}

pub fn mesh_oracle_field(mesh: TriangleMesh) -> Result<MeshOracleField> {
    MeshOracleField::new(mesh)
}
