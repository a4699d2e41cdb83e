//! Exact geometric kernels over triangle meshes.

mod aabb;
mod bvh;
pub mod io;
mod kdtree;
mod mesh;
mod normalize;
pub mod primitives;
pub mod query;
mod sampling;
pub mod topology;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use aabb::Aabb;
pub use bvh::{build_bvh, ground_truth_flag, ground_truth_udf, segment_intersects, Bvh, BvhNode};
pub use kdtree::PointIndex;
pub use mesh::TriangleMesh;
pub use normalize::{normalize_mesh, Normalization, NORMALIZED_EXTENT};
pub use sampling::{sample_surface, sample_surface_with_faces, uniform_barycentric, SurfaceSampler};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Distance below which a segment counts as touching a triangle.
pub const EPS_GEOM: f64 = 1e-12;

/// Closed segment between two points. `a == b` is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
}

impl Segment {
    pub fn new(a: Point3, b: Point3) -> Self {
        Self { a, b }
    }

    pub fn direction(&self) -> Vec3 {
        self.b - self.a
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        self.a + self.direction() * t
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&[self.a, self.b])
    }
}

/// Seed for every random stream in the crate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `stream` of this seed.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}
