use log::{debug, info};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{FlagLoss, LossSettings, ModelConfig, ModelParams};
use super::Real;
use crate::datagen::{Dataset, TrainingPair};
use crate::geometry::RngSeed;
use crate::{GifsError, Result};

/// Pairs evaluated together inside one parallel task.
pub const TRAIN_CHUNK: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub delta: f64,
    pub lambda: f64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub pairs_per_step: usize,
    pub epochs: usize,
    pub seed: RngSeed,
    #[serde(default)]
    pub flag_loss: FlagLoss,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            lambda: 10.0,
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            pairs_per_step: 512,
            epochs: 10,
            seed: RngSeed(0),
            flag_loss: FlagLoss::L1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GifsError::InvalidConfig(m.into()));
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if !(self.lambda >= 0.0) {
            return bad("lambda must be non-negative");
        }
        if !(self.lr > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.eps > 0.0) {
            return bad("Adam moments must lie in [0, 1) and eps must be positive");
        }
        if self.pairs_per_step == 0 {
            return bad("pairs_per_step must be positive");
        }
        Ok(())
    }

    pub fn loss_settings(&self) -> LossSettings {
        LossSettings {
            delta: self.delta,
            lambda: self.lambda,
            flag_loss: self.flag_loss,
        }
    }
}

/// Trained parameters and the mean per-pair loss: entry 0 at
/// initialization, then one entry per epoch.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub params: ModelParams<f32>,
    pub loss_trace: Vec<f64>,
}

/// Adam state for every parameter tensor.
#[derive(Clone, Debug)]
pub struct Adam<T> {
    m: ModelParams<T>,
    v: ModelParams<T>,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl<T: Real> Adam<T> {
    pub fn new(params: &ModelParams<T>, cfg: &TrainConfig) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
            lr: cfg.lr,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.eps,
        }
    }

    pub fn step(&mut self, params: &mut ModelParams<T>, grad: &ModelParams<T>) {
        self.t += 1;
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        let step = T::of(self.lr * c2.sqrt() / c1);
        let eps = T::of(self.eps * c2.sqrt());
        let one = T::one();
        for (((p, g), m), v) in params
            .tensors_mut()
            .into_iter()
            .zip(grad.tensors())
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut())
        {
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + (one - b1) * gi;
                v[i] = b2 * v[i] + (one - b2) * gi * gi;
                p[i] -= step * m[i] / (v[i].sqrt() + eps);
            }
        }
    }
}

/// Fits a fresh model to one shape's pairs with Adam on the mean batch loss.
pub fn train(dataset: &Dataset, tcfg: &TrainConfig, mcfg: &ModelConfig) -> Result<TrainedModel> {
    train_with(dataset, tcfg, mcfg, |_, _, _| {})
}

/// [`train`] calling `on_epoch(epoch, params, mean_loss)` after every epoch.
pub fn train_with<F>(dataset: &Dataset, tcfg: &TrainConfig, mcfg: &ModelConfig, mut on_epoch: F) -> Result<TrainedModel>
where
    F: FnMut(usize, &ModelParams<f32>, f64),
{
    tcfg.validate()?;
    mcfg.validate()?;
    if dataset.records.is_empty() {
        return Err(GifsError::InvalidConfig("cannot train on an empty dataset".into()));
    }
    let mut rng = tcfg.seed.rng();
    let mut params = ModelParams::<f32>::init(mcfg, &mut rng);
    // A zero output bias puts every initial distance at softplus(0) = 0.69,
    // above delta, where the clamped loss has no gradient. Start inside the
    // band instead.
    let last = params.udf_mlp.biases.len() - 1;
    params.udf_mlp.biases[last][0] = inverse_softplus(0.5 * tcfg.delta) as f32;
    let settings = tcfg.loss_settings();
    let n = dataset.records.len();
    let init_loss = params.loss_chunked(&dataset.records, &settings, TRAIN_CHUNK) / n as f64;
    info!("training {} parameters on {n} pairs, initial loss {init_loss:.5}", params.parameter_count());
    let mut trace = vec![init_loss];
    let mut adam = Adam::new(&params, tcfg);
    let mut order: Vec<usize> = (0..n).collect();
    let mut batch: Vec<TrainingPair> = Vec::with_capacity(tcfg.pairs_per_step);
    for epoch in 0..tcfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (step, idx) in order.chunks(tcfg.pairs_per_step).enumerate() {
            batch.clear();
            batch.extend(idx.iter().map(|&i| dataset.records[i]));
            let mut grad = params.zeros_like();
            let loss = params.loss_and_grad(&batch, &settings, TRAIN_CHUNK, &mut grad);
            if !loss.is_finite() {
                return Err(GifsError::DivergedTraining { epoch, step });
            }
            let scale = 1.0 / batch.len() as f32;
            for t in grad.tensors_mut() {
                t.iter_mut().for_each(|g| *g *= scale);
            }
            adam.step(&mut params, &grad);
            total += loss;
        }
        if !params.is_finite() {
            return Err(GifsError::DivergedTraining {
                epoch,
                step: n.div_ceil(tcfg.pairs_per_step),
            });
        }
        let mean = total / n as f64;
        debug!("epoch {epoch}: mean loss {mean:.5}");
        trace.push(mean);
        on_epoch(epoch, &params, mean);
    }
    if let Some(last) = trace.last() {
        info!("finished {} epochs, final mean loss {last:.5}", tcfg.epochs);
    }
    Ok(TrainedModel {
        params,
        loss_trace: trace,
    })
}

fn inverse_softplus(y: f64) -> f64 {
    y + (-(-y).exp_m1()).ln()
}

/// Mean per-pair loss of `params` on `records`.
pub fn evaluate_loss<T: Real>(params: &ModelParams<T>, records: &[TrainingPair], settings: &LossSettings) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    params.loss_chunked(records, settings, TRAIN_CHUNK) / records.len() as f64
}

/// Flag accuracy at `threshold` and the mean absolute distance error over
/// points whose true distance is within `band`.
pub fn evaluate_accuracy(params: &ModelParams<f32>, records: &[TrainingPair], threshold: f64, band: f64) -> (f64, f64) {
    use crate::fields::PairField;
    let field = super::LearnedField::new(params.clone());
    let pairs: Vec<_> = records.iter().map(|r| (r.point1(), r.point2())).collect();
    let flags = field.flags(&pairs);
    let correct = flags
        .iter()
        .zip(records)
        .filter(|(f, r)| ((**f >= threshold) as u8) == r.flag)
        .count();
    let mut pts = Vec::new();
    let mut gts = Vec::new();
    for r in records {
        for (p, u) in [(r.point1(), r.udf1), (r.point2(), r.udf2)] {
            if (u as f64) <= band {
                pts.push(p);
                gts.push(u as f64);
            }
        }
    }
    let pred = field.udfs(&pts);
    let mae = if pts.is_empty() {
        0.0
    } else {
        pred.iter().zip(&gts).map(|(a, b)| (a - b).abs()).sum::<f64>() / pts.len() as f64
    };
    (correct as f64 / records.len().max(1) as f64, mae)
}
