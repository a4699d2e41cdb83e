use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    Sigmoid,
    Softplus,
}

impl OutputActivation {
    pub fn apply<T: Real>(self, y: T) -> T {
        match self {
            OutputActivation::Sigmoid => sigmoid(y),
            OutputActivation::Softplus => softplus(y),
        }
    }

    /// Derivative with respect to the pre-activation.
    pub fn derivative<T: Real>(self, y: T) -> T {
        match self {
            OutputActivation::Sigmoid => {
                let s = sigmoid(y);
                s * (T::one() - s)
            }
            OutputActivation::Softplus => sigmoid(y),
        }
    }
}

pub fn sigmoid<T: Real>(y: T) -> T {
    if y >= T::zero() {
        T::one() / (T::one() + (-y).exp())
    } else {
        let e = y.exp();
        e / (T::one() + e)
    }
}

pub fn softplus<T: Real>(y: T) -> T {
    y.max(T::zero()) + (-y.abs()).exp().ln_1p()
}

/// Fully connected ReLU network with a scalar output. Weights are stored
/// `[in][out]` so a batch `X` maps to `X W + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T> {
    pub weights: Vec<Array2<T>>,
    pub biases: Vec<Array1<T>>,
    pub output: OutputActivation,
}

/// Layer inputs recorded by [`Mlp::forward_cached`] for backpropagation.
#[derive(Clone, Debug)]
pub struct MlpCache<T> {
    inputs: Vec<Array2<T>>,
}

impl<T: Real> Mlp<T> {
    /// `layers` linear maps: `input -> width -> ... -> width -> 1`.
    pub fn zeros(input: usize, width: usize, layers: usize, output: OutputActivation) -> Self {
        assert!(layers >= 1);
        let mut weights = Vec::with_capacity(layers);
        let mut biases = Vec::with_capacity(layers);
        for l in 0..layers {
            let fan_in = if l == 0 { input } else { width };
            let fan_out = if l + 1 == layers { 1 } else { width };
            weights.push(Array2::zeros((fan_in, fan_out)));
            biases.push(Array1::zeros(fan_out));
        }
        Self {
            weights,
            biases,
            output,
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn random<R: Rng>(input: usize, width: usize, layers: usize, output: OutputActivation, rng: &mut R) -> Self {
        let mut m = Self::zeros(input, width, layers, output);
        for w in &mut m.weights {
            let (fi, fo) = w.dim();
            let bound = (6.0 / (fi + fo) as f64).sqrt();
            w.mapv_inplace(|_| T::of(rng.random_range(-bound..bound)));
        }
        m
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            weights: self.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            biases: self.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
            output: self.output,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    fn hidden(&self, x: ArrayView2<T>, mut cache: Option<&mut Vec<Array2<T>>>) -> Array1<T> {
        let last = self.weights.len() - 1;
        let mut a = x.to_owned();
        for l in 0..last {
            let mut z = a.dot(&self.weights[l]);
            z += &self.biases[l];
            z.mapv_inplace(|v| v.max(T::zero()));
            if let Some(c) = cache.as_deref_mut() {
                c.push(std::mem::replace(&mut a, z));
            } else {
                a = z;
            }
        }
        let mut y = a.dot(&self.weights[last]);
        y += &self.biases[last];
        if let Some(c) = cache {
            c.push(a);
        }
        y.column(0).to_owned()
    }

    /// Pre-activation outputs (logits) for a batch.
    pub fn logits(&self, x: ArrayView2<T>) -> Array1<T> {
        self.hidden(x, None)
    }

    /// Activated outputs for a batch.
    pub fn forward(&self, x: ArrayView2<T>) -> Array1<T> {
        let out = self.output;
        self.logits(x).mapv(|y| out.apply(y))
    }

    /// Logits plus the cache needed by [`Mlp::backward`].
    pub fn forward_cached(&self, x: ArrayView2<T>) -> (Array1<T>, MlpCache<T>) {
        let mut inputs = Vec::with_capacity(self.weights.len());
        let y = self.hidden(x, Some(&mut inputs));
        (y, MlpCache { inputs })
    }

    /// Backpropagates `d_logits` (dL/d pre-activation output, one per row),
    /// accumulating parameter gradients into `grad` and returning dL/dX.
    pub fn backward(&self, cache: &MlpCache<T>, d_logits: &Array1<T>, grad: &mut Mlp<T>) -> Array2<T> {
        let last = self.weights.len() - 1;
        let mut delta = d_logits.clone().insert_axis(Axis(1));
        for l in (0..=last).rev() {
            let a = &cache.inputs[l];
            grad.weights[l] += &a.t().dot(&delta);
            grad.biases[l] += &delta.sum_axis(Axis(0));
            let mut prev = delta.dot(&self.weights[l].t());
            if l > 0 {
                // ReLU gate: the cached input of layer l is the activated
                // output of layer l - 1.
                prev.zip_mut_with(a, |d, &av| {
                    if av <= T::zero() {
                        *d = T::zero();
                    }
                });
            }
            delta = prev;
        }
        delta
    }
}
