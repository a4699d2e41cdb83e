use ndarray::{s, Array1, Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{FeatureGridConfig, FeatureGrids, Stencil};
use super::mlp::{sigmoid, softplus, Mlp, OutputActivation};
use super::Real;
use crate::datagen::TrainingPair;
use crate::fields::PairField;
use crate::geometry::Point3;
use crate::{GifsError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub grid: FeatureGridConfig,
    /// Width of every hidden layer.
    pub width: usize,
    /// Number of linear layers in each decoder.
    pub layers: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            grid: FeatureGridConfig::default(),
            width: 256,
            layers: 5,
        }
    }
}

impl ModelConfig {
    /// Smallest useful configuration, for gradient checks.
    pub fn tiny() -> Self {
        Self {
            grid: FeatureGridConfig {
                resolutions: vec![2],
                channels: 4,
            },
            width: 8,
            layers: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.width == 0 || self.layers == 0 {
            return Err(GifsError::InvalidConfig("decoder width and depth must be positive".into()));
        }
        Ok(())
    }
}

/// Which penalty drives the flag decoder. The absolute error is the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagLoss {
    #[default]
    L1,
    Bce,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSettings {
    /// Distances above `delta` are not distinguished.
    pub delta: f64,
    /// Weight of the two distance terms.
    pub lambda: f64,
    pub flag_loss: FlagLoss,
}

impl Default for LossSettings {
    fn default() -> Self {
        Self {
            delta: 0.1,
            lambda: 10.0,
            flag_loss: FlagLoss::L1,
        }
    }
}

/// Feature grids plus the flag and distance decoders.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub config: ModelConfig,
    pub grids: FeatureGrids<T>,
    pub flag_mlp: Mlp<T>,
    pub udf_mlp: Mlp<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn zeros(config: &ModelConfig) -> Self {
        let d = config.grid.embedding_dim();
        Self {
            config: config.clone(),
            grids: FeatureGrids::zeros(&config.grid),
            flag_mlp: Mlp::zeros(d, config.width, config.layers, OutputActivation::Sigmoid),
            udf_mlp: Mlp::zeros(d, config.width, config.layers, OutputActivation::Softplus),
        }
    }

    /// Grid features `N(0, 0.01^2)`, Glorot-uniform decoder weights, zero
    /// biases.
    pub fn init<R: Rng>(config: &ModelConfig, rng: &mut R) -> Self {
        let d = config.grid.embedding_dim();
        let grids = FeatureGrids::random(&config.grid, 0.01, rng);
        let flag_mlp = Mlp::random(d, config.width, config.layers, OutputActivation::Sigmoid, rng);
        let udf_mlp = Mlp::random(d, config.width, config.layers, OutputActivation::Softplus, rng);
        Self {
            config: config.clone(),
            grids,
            flag_mlp,
            udf_mlp,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.config)
    }

    /// Every tensor in storage order: grid levels, then each decoder's
    /// weights and biases layer by layer (flag decoder first).
    pub fn tensors(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = self.grids.levels.iter().map(|g| g.as_slice().unwrap()).collect();
        for mlp in [&self.flag_mlp, &self.udf_mlp] {
            for (w, b) in mlp.weights.iter().zip(&mlp.biases) {
                out.push(w.as_slice().unwrap());
                out.push(b.as_slice().unwrap());
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = self
            .grids
            .levels
            .iter_mut()
            .map(|g| g.as_slice_mut().unwrap())
            .collect();
        for mlp in [&mut self.flag_mlp, &mut self.udf_mlp] {
            for (w, b) in mlp.weights.iter_mut().zip(mlp.biases.iter_mut()) {
                out.push(w.as_slice_mut().unwrap());
                out.push(b.as_slice_mut().unwrap());
            }
        }
        out
    }

    /// Tensor names and shapes, matching [`ModelParams::tensors`].
    pub fn tensor_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let mut out: Vec<(String, Vec<usize>)> = self
            .grids
            .levels
            .iter()
            .enumerate()
            .map(|(l, g)| (format!("grid.{l}"), g.shape().to_vec()))
            .collect();
        for (name, mlp) in [("flag", &self.flag_mlp), ("udf", &self.udf_mlp)] {
            for (l, (w, b)) in mlp.weights.iter().zip(&mlp.biases).enumerate() {
                out.push((format!("{name}.{l}.weight"), w.shape().to_vec()));
                out.push((format!("{name}.{l}.bias"), b.shape().to_vec()));
            }
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn embed(&self, p: &Point3) -> Vec<T> {
        self.grids.embed(p)
    }

    /// Flag decoder on the elementwise maximum of both embeddings.
    pub fn predict_flag(&self, p1: &Point3, p2: &Point3) -> f64 {
        let z1 = self.embed(p1);
        let z2 = self.embed(p2);
        let zf: Vec<T> = z1.iter().zip(&z2).map(|(&a, &b)| a.max(b)).collect();
        let x = ArrayView2::from_shape((1, zf.len()), &zf).unwrap();
        self.flag_mlp.forward(x)[0].f64()
    }

    pub fn predict_udf(&self, p: &Point3) -> f64 {
        let z = self.embed(p);
        let x = ArrayView2::from_shape((1, z.len()), &z).unwrap();
        self.udf_mlp.forward(x)[0].f64()
    }

    pub fn predict_flags(&self, pairs: &[(Point3, Point3)]) -> Vec<f64> {
        let a: Vec<Point3> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<Point3> = pairs.iter().map(|p| p.1).collect();
        let (mut z1, _) = self.grids.embed_batch(&a);
        let (z2, _) = self.grids.embed_batch(&b);
        z1.zip_mut_with(&z2, |x, &y| *x = x.max(y));
        self.flag_mlp.forward(z1.view()).iter().map(|v| v.f64()).collect()
    }

    pub fn predict_udfs(&self, points: &[Point3]) -> Vec<f64> {
        let (z, _) = self.grids.embed_batch(points);
        self.udf_mlp.forward(z.view()).iter().map(|v| v.f64()).collect()
    }

    /// Absolute flag error of one pair.
    pub fn loss_flag(&self, p1: &Point3, p2: &Point3, b: u8) -> f64 {
        (self.predict_flag(p1, p2) - b as f64).abs()
    }

    /// Distance error with both sides clamped at `delta`.
    pub fn loss_udf(&self, p: &Point3, gt: f64, delta: f64) -> f64 {
        (self.predict_udf(p).min(delta) - gt.min(delta)).abs()
    }

    /// Summed training loss over `batch`.
    pub fn loss(&self, batch: &[TrainingPair], settings: &LossSettings) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        let (z, _) = self.grids.embed_batch(&stacked_points(batch));
        let (zf, zu) = split_embeddings(&z, batch.len());
        let flag_logits = self.flag_mlp.logits(zf.view());
        let udf_logits = self.udf_mlp.logits(zu);
        loss_terms::<T>(batch, &flag_logits, &udf_logits, settings).0
    }

    /// [`ModelParams::loss`] over chunks evaluated in parallel, summed in
    /// chunk order.
    pub fn loss_chunked(&self, batch: &[TrainingPair], settings: &LossSettings, chunk: usize) -> f64 {
        batch
            .par_chunks(chunk.max(1))
            .map(|c| self.loss(c, settings))
            .collect::<Vec<f64>>()
            .into_iter()
            .sum()
    }

    /// Summed loss over `batch`, with its gradient accumulated into `grad`.
    /// Chunks run in parallel; their gradients are added in chunk order so
    /// the result does not depend on the thread count.
    pub fn loss_and_grad(
        &self,
        batch: &[TrainingPair],
        settings: &LossSettings,
        chunk: usize,
        grad: &mut ModelParams<T>,
    ) -> f64 {
        let parts: Vec<ChunkGrad<T>> = batch
            .par_chunks(chunk.max(1))
            .map(|c| self.chunk_grad(c, settings))
            .collect();
        let mut loss = 0.0;
        for part in parts {
            loss += part.loss;
            grad.flag_mlp.accumulate(&part.flag);
            grad.udf_mlp.accumulate(&part.udf);
            self.grids.scatter_grad(&mut grad.grids.levels, &part.stencils, part.dz.view());
        }
        loss
    }

    fn chunk_grad(&self, batch: &[TrainingPair], settings: &LossSettings) -> ChunkGrad<T> {
        let n = batch.len();
        let (z, stencils) = self.grids.embed_batch(&stacked_points(batch));
        let (zf, zu) = split_embeddings(&z, n);
        let (flag_logits, flag_cache) = self.flag_mlp.forward_cached(zf.view());
        let (udf_logits, udf_cache) = self.udf_mlp.forward_cached(zu);
        let (loss, d_flag, d_udf) = loss_terms::<T>(batch, &flag_logits, &udf_logits, settings);
        let mut flag = self.flag_mlp.zeros_like();
        let mut udf = self.udf_mlp.zeros_like();
        let dzf = self.flag_mlp.backward(&flag_cache, &d_flag, &mut flag);
        let mut dz = self.udf_mlp.backward(&udf_cache, &d_udf, &mut udf);
        // The max sends each fused gradient to the larger input; ties go to
        // the first point.
        for i in 0..n {
            for j in 0..dzf.ncols() {
                let row = if z[[i, j]] >= z[[n + i, j]] { i } else { n + i };
                dz[[row, j]] += dzf[[i, j]];
            }
        }
        ChunkGrad {
            loss,
            flag,
            udf,
            stencils,
            dz,
        }
    }
}

struct ChunkGrad<T> {
    loss: f64,
    flag: Mlp<T>,
    udf: Mlp<T>,
    stencils: Vec<Stencil>,
    dz: Array2<T>,
}

impl<T: Real> Mlp<T> {
    fn accumulate(&mut self, other: &Mlp<T>) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }
}

/// First points of every pair, then all second points.
fn stacked_points(batch: &[TrainingPair]) -> Vec<Point3> {
    batch
        .iter()
        .map(TrainingPair::point1)
        .chain(batch.iter().map(TrainingPair::point2))
        .collect()
}

/// Fused flag input and the stacked distance input from stacked embeddings.
fn split_embeddings<T: Real>(z: &Array2<T>, n: usize) -> (Array2<T>, ArrayView2<'_, T>) {
    let mut zf = z.slice(s![..n, ..]).to_owned();
    zf.zip_mut_with(&z.slice(s![n.., ..]), |a, &b| *a = a.max(b));
    (zf, z.view())
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Loss value and dL/dlogit for both decoders.
fn loss_terms<T: Real>(
    batch: &[TrainingPair],
    flag_logits: &Array1<T>,
    udf_logits: &Array1<T>,
    settings: &LossSettings,
) -> (f64, Array1<T>, Array1<T>) {
    let n = batch.len();
    let delta = settings.delta;
    let mut loss = 0.0;
    let mut d_flag = Array1::<T>::zeros(n);
    let mut d_udf = Array1::<T>::zeros(2 * n);
    for (i, r) in batch.iter().enumerate() {
        let b = r.flag as f64;
        let y = flag_logits[i].f64();
        let f = sigmoid(y);
        match settings.flag_loss {
            FlagLoss::L1 => {
                loss += (f - b).abs();
                d_flag[i] = T::of(sign(f - b) * f * (1.0 - f));
            }
            FlagLoss::Bce => {
                // Cross-entropy written on the logit.
                loss += y.max(0.0) - y * b + (-y.abs()).exp().ln_1p();
                d_flag[i] = T::of(f - b);
            }
        }
        for (k, gt) in [(i, r.udf1 as f64), (n + i, r.udf2 as f64)] {
            let y = udf_logits[k].f64();
            let h = softplus(y);
            let diff = h.min(delta) - gt.min(delta);
            loss += settings.lambda * diff.abs();
            if h < delta {
                d_udf[k] = T::of(settings.lambda * sign(diff) * sigmoid(y));
            }
        }
    }
    (loss, d_flag, d_udf)
}

/// A trained model viewed as a pair field. Flags are probabilities here;
/// callers threshold them.
#[derive(Clone, Debug)]
pub struct LearnedField {
    pub params: ModelParams<f32>,
}

const FIELD_CHUNK: usize = 1024;

impl LearnedField {
    pub fn new(params: ModelParams<f32>) -> Self {
        Self { params }
    }
}

impl PairField for LearnedField {
    fn flag(&self, a: &Point3, b: &Point3) -> f64 {
        self.params.predict_flag(a, b)
    }

    fn udf(&self, p: &Point3) -> f64 {
        self.params.predict_udf(p)
    }

    fn flags(&self, pairs: &[(Point3, Point3)]) -> Vec<f64> {
        pairs
            .par_chunks(FIELD_CHUNK)
            .map(|c| self.params.predict_flags(c))
            .collect::<Vec<_>>()
            .concat()
    }

    fn udfs(&self, points: &[Point3]) -> Vec<f64> {
        points
            .par_chunks(FIELD_CHUNK)
            .map(|c| self.params.predict_udfs(c))
            .collect::<Vec<_>>()
            .concat()
    }
}
