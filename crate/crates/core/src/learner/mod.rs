//! Learned pair field: multi-resolution feature grids feeding a flag decoder
//! (on the elementwise max of both embeddings) and a distance decoder.

mod format;
mod grid;
mod mlp;
mod model;
mod real;
mod train;

pub use format::{read_model, read_model_from, write_model, write_model_to, MODEL_MAGIC};
pub use grid::{FeatureGridConfig, FeatureGrids, Stencil};
pub use mlp::{sigmoid, softplus, Mlp, MlpCache, OutputActivation};
pub use model::{FlagLoss, LearnedField, LossSettings, ModelConfig, ModelParams};
pub use real::Real;
pub use train::{evaluate_accuracy, evaluate_loss, train, train_with, Adam, TrainConfig, TrainedModel, TRAIN_CHUNK};
