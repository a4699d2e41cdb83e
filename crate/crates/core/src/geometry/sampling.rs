use rand::Rng;

use super::{Point3, RngSeed, TriangleMesh};
use crate::{GifsError, Result};

/// Area-weighted face sampler over a fixed mesh.
#[derive(Clone, Debug)]
pub struct SurfaceSampler<'a> {
    mesh: &'a TriangleMesh,
    cumulative: Vec<f64>,
}

impl<'a> SurfaceSampler<'a> {
    pub fn new(mesh: &'a TriangleMesh) -> Result<Self> {
        if mesh.is_empty() {
            return Err(GifsError::EmptyMesh);
        }
        let mut total = 0.0;
        let cumulative: Vec<f64> = (0..mesh.face_count())
            .map(|f| {
                total += mesh.face_area(f);
                total
            })
            .collect();
        if !(total > 0.0) || !total.is_finite() {
            return Err(GifsError::DegenerateMesh("surface area is zero".into()));
        }
        Ok(Self { mesh, cumulative })
    }

    pub fn total_area(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// One uniform surface point and the face it lies on.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Point3) {
        let u = rng.random::<f64>() * self.total_area();
        let face = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        let [a, b, c] = self.mesh.triangle(face);
        let [wa, wb, wc] = uniform_barycentric(rng);
        (face, Point3::from(a.coords * wa + b.coords * wb + c.coords * wc))
    }
}

/// Barycentric weights of a uniform point on a triangle.
pub fn uniform_barycentric<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let r1: f64 = rng.random::<f64>().sqrt();
    let r2: f64 = rng.random();
    [1.0 - r1, r1 * (1.0 - r2), r1 * r2]
}

/// `n` area-uniform points on the surface, reproducible from `seed`.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, seed: RngSeed) -> Result<Vec<Point3>> {
    Ok(sample_surface_with_faces(mesh, n, seed)?
        .into_iter()
        .map(|(_, p)| p)
        .collect())
}

pub fn sample_surface_with_faces(mesh: &TriangleMesh, n: usize, seed: RngSeed) -> Result<Vec<(usize, Point3)>> {
    if n == 0 {
        return Err(GifsError::InvalidConfig("sample count must be at least 1".into()));
    }
    let sampler = SurfaceSampler::new(mesh)?;
    let mut rng = seed.rng();
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}
