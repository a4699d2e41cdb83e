use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Real;
use crate::geometry::Point3;
use crate::{GifsError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGridConfig {
    /// Nodes per axis for each level.
    pub resolutions: Vec<usize>,
    /// Feature channels per level.
    pub channels: usize,
}

impl Default for FeatureGridConfig {
    fn default() -> Self {
        Self {
            resolutions: vec![8, 16, 32],
            channels: 16,
        }
    }
}

impl FeatureGridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() || self.resolutions.iter().any(|&k| k < 2) {
            return Err(GifsError::InvalidConfig("every grid resolution must be at least 2".into()));
        }
        if self.channels == 0 {
            return Err(GifsError::InvalidConfig("grid channels must be at least 1".into()));
        }
        Ok(())
    }

    /// Length of the concatenated embedding.
    pub fn embedding_dim(&self) -> usize {
        self.resolutions.len() * self.channels
    }
}

/// Trilinear stencil of one point on one level: eight node rows and weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub nodes: [u32; 8],
    pub weights: [f64; 8],
}

/// Dense per-level feature arrays over `[-0.5, 0.5]^3`. Level `l` stores
/// `K^3` rows of `channels` features, row `(i * K + j) * K + k` holding the
/// node at `(-0.5 + i / (K - 1), -0.5 + j / (K - 1), -0.5 + k / (K - 1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureGrids<T> {
    pub config: FeatureGridConfig,
    pub levels: Vec<Array2<T>>,
}

impl<T: Real> FeatureGrids<T> {
    pub fn zeros(config: &FeatureGridConfig) -> Self {
        let levels = config
            .resolutions
            .iter()
            .map(|&k| Array2::zeros((k * k * k, config.channels)))
            .collect();
        Self {
            config: config.clone(),
            levels,
        }
    }

    /// Features drawn from `N(0, std^2)`.
    pub fn random<R: Rng>(config: &FeatureGridConfig, std: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, std).expect("finite std");
        let mut g = Self::zeros(config);
        for level in &mut g.levels {
            level.mapv_inplace(|_| T::of(normal.sample(rng)));
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.config.embedding_dim()
    }

    pub fn stencil(&self, level: usize, p: &Point3) -> Stencil {
        let k = self.config.resolutions[level];
        let scale = (k - 1) as f64;
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let u = (p[a].clamp(-0.5, 0.5) + 0.5) * scale;
            let i = (u.floor() as usize).min(k - 2);
            base[a] = i;
            frac[a] = (u - i as f64).clamp(0.0, 1.0);
        }
        let mut nodes = [0u32; 8];
        let mut weights = [0.0f64; 8];
        for c in 0..8 {
            let (dx, dy, dz) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
            let (i, j, l) = (base[0] + dx, base[1] + dy, base[2] + dz);
            nodes[c] = ((i * k + j) * k + l) as u32;
            let wx = if dx == 1 { frac[0] } else { 1.0 - frac[0] };
            let wy = if dy == 1 { frac[1] } else { 1.0 - frac[1] };
            let wz = if dz == 1 { frac[2] } else { 1.0 - frac[2] };
            weights[c] = wx * wy * wz;
        }
        Stencil { nodes, weights }
    }

    /// Concatenated trilinear features of `p`, written into `out`.
    pub fn embed_into(&self, p: &Point3, out: &mut [T], mut stencils: Option<&mut Vec<Stencil>>) {
        let ch = self.config.channels;
        for (level, grid) in self.levels.iter().enumerate() {
            let s = self.stencil(level, p);
            let dst = &mut out[level * ch..(level + 1) * ch];
            dst.iter_mut().for_each(|v| *v = T::zero());
            for c in 0..8 {
                let w = T::of(s.weights[c]);
                if s.weights[c] == 0.0 {
                    continue;
                }
                let row = grid.row(s.nodes[c] as usize);
                for (d, &f) in dst.iter_mut().zip(row.iter()) {
                    *d += w * f;
                }
            }
            if let Some(st) = stencils.as_deref_mut() {
                st.push(s);
            }
        }
    }

    pub fn embed(&self, p: &Point3) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.embed_into(p, &mut out, None);
        out
    }

    /// Embeddings of many points (one row each) and their stencils, `levels`
    /// consecutive entries per point.
    pub fn embed_batch(&self, points: &[Point3]) -> (Array2<T>, Vec<Stencil>) {
        let d = self.dim();
        let mut z = Array2::zeros((points.len(), d));
        let mut stencils = Vec::with_capacity(points.len() * self.levels.len());
        for (row, p) in z.rows_mut().into_iter().zip(points) {
            let mut row = row;
            self.embed_into(p, row.as_slice_mut().unwrap(), Some(&mut stencils));
        }
        (z, stencils)
    }

    /// Accumulates `dz` (one row per point, matching `stencils`) into the
    /// gradient arrays `grad` of the same shapes as `self.levels`.
    pub fn scatter_grad(&self, grad: &mut [Array2<T>], stencils: &[Stencil], dz: ArrayView2<T>) {
        let ch = self.config.channels;
        let nl = self.levels.len();
        for (pi, drow) in dz.rows().into_iter().enumerate() {
            for level in 0..nl {
                let s = &stencils[pi * nl + level];
                let src = drow.slice(ndarray::s![level * ch..(level + 1) * ch]);
                for c in 0..8 {
                    if s.weights[c] == 0.0 {
                        continue;
                    }
                    let w = T::of(s.weights[c]);
                    let mut g = grad[level].row_mut(s.nodes[c] as usize);
                    for (gv, &dv) in g.iter_mut().zip(src.iter()) {
                        *gv += w * dv;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grids() -> FeatureGrids<f64> {
        let cfg = FeatureGridConfig {
            resolutions: vec![3, 5],
            channels: 2,
        };
        FeatureGrids::random(&cfg, 1.0, &mut ChaCha8Rng::seed_from_u64(1))
    }

    #[test]
    fn node_query_returns_node_features() {
        let g = grids();
        // Level 0 has nodes at -0.5, 0, 0.5; (0, 0.5, -0.5) is node (1, 2, 0).
        let z = g.embed(&Point3::new(0.0, 0.5, -0.5));
        let (i, j, k) = (1, 2, 0);
        let row = g.levels[0].row((i * 3 + j) * 3 + k);
        assert_eq!(&z[..2], row.as_slice().unwrap());
    }

    #[test]
    fn cell_center_is_corner_mean() {
        let g = grids();
        let z = g.embed(&Point3::new(-0.25, -0.25, 0.25));
        let mut mean = [0.0; 2];
        for (i, j, k) in [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1), (0, 0, 2), (1, 0, 2), (0, 1, 2), (1, 1, 2)] {
            let row = g.levels[0].row((i * 3 + j) * 3 + k);
            mean[0] += row[0] / 8.0;
            mean[1] += row[1] / 8.0;
        }
        assert!((z[0] - mean[0]).abs() < 1e-14 && (z[1] - mean[1]).abs() < 1e-14);
    }

    #[test]
    fn outside_points_are_clamped() {
        let g = grids();
        assert_eq!(g.embed(&Point3::new(3.0, -9.0, 0.7)), g.embed(&Point3::new(0.5, -0.5, 0.5)));
    }

    #[test]
    fn weights_form_partition_of_unity() {
        let g = grids();
        let s = g.stencil(1, &Point3::new(0.123, -0.377, 0.41));
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
