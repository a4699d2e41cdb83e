use super::ExtractionConfig;
use crate::fields::PairField;

use crate::geometry::{uniform_barycentric, Point3, RngSeed, TriangleMesh, Vec3};
use crate::{GifsError, Result};

const RMS_DECAY: f64 = 0.99;
const RMS_EPS: f64 = 1e-8;

/// Moves vertices to lower the summed distance of one random point per face,
/// using RMSprop on the chain-rule gradient through the barycentric weights.
/// The distance gradient is a central difference with step of one eighth of
/// the final cube size. Connectivity is unchanged.
pub fn refine_mesh<F: PairField + ?Sized>(field: &F, mesh: &TriangleMesh, cfg: &ExtractionConfig) -> Result<TriangleMesh> {
    cfg.validate()?;
    let mut out = mesh.clone();
    if cfg.refine_iters == 0 || mesh.faces.is_empty() {
        return Ok(out);
    }
    let h = cfg.final_cube_size() / 8.0;
    let mut rng = cfg.seed.stream(1);
    let mut sq = vec![Vec3::zeros(); mesh.vertices.len()];
    let mut queries = Vec::with_capacity(mesh.faces.len() * 6);
    let mut weights = Vec::with_capacity(mesh.faces.len());
    for iter in 0..cfg.refine_iters {
        queries.clear();
        weights.clear();
        for f in &out.faces {
            let w = uniform_barycentric(&mut rng);
            let [a, b, c] = f.map(|v| out.vertices[v as usize].coords);
            let p = Point3::from(a * w[0] + b * w[1] + c * w[2]);
            for axis in 0..3 {
                let mut e = Vec3::zeros();
                e[axis] = h;
                queries.push(p + e);
                queries.push(p - e);
            }
            weights.push(w);
        }
        let d = field.udfs(&queries);
        let mut grad = vec![Vec3::zeros(); out.vertices.len()];
        for (fi, f) in out.faces.iter().enumerate() {
            let q = &d[fi * 6..fi * 6 + 6];
            let g = Vec3::new(q[0] - q[1], q[2] - q[3], q[4] - q[5]) / (2.0 * h);
            for (&v, &w) in f.iter().zip(&weights[fi]) {
                grad[v as usize] += g * w;
            }
        }
        for ((v, g), s) in out.vertices.iter_mut().zip(&grad).zip(sq.iter_mut()) {
            *s = *s * RMS_DECAY + g.component_mul(g) * (1.0 - RMS_DECAY);
            for k in 0..3 {
                v[k] -= cfg.refine_lr * g[k] / (s[k].sqrt() + RMS_EPS);
            }
            if !v.coords.iter().all(|c| c.is_finite()) {
                return Err(GifsError::RefinementDiverged(iter));
            }
        }
    }
    Ok(out)
}

/// Mean distance over `samples_per_face` random points on every face.
pub fn mean_surface_udf<F: PairField + ?Sized>(field: &F, mesh: &TriangleMesh, samples_per_face: usize, seed: RngSeed) -> f64 {
    if mesh.faces.is_empty() || samples_per_face == 0 {
        return 0.0;
    }
    let mut rng = seed.rng();
    let mut pts = Vec::with_capacity(mesh.faces.len() * samples_per_face);
    for f in &mesh.faces {
        let [a, b, c] = f.map(|v| mesh.vertices[v as usize].coords);
        for _ in 0..samples_per_face {
            let w: [f64; 3] = uniform_barycentric(&mut rng);
            pts.push(Point3::from(a * w[0] + b * w[1] + c * w[2]));
        }
    }
    field.udfs(&pts).iter().sum::<f64>() / pts.len() as f64
}
