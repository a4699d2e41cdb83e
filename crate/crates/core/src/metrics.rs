//! Chamfer distance and F-score between point sets sampled from surfaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{sample_surface, Point3, PointIndex, RngSeed, TriangleMesh};
use crate::{GifsError, Result};

/// Thresholds reported by default.
pub const DEFAULT_THRESHOLDS: [f64; 2] = [0.005, 0.01];
pub const DEFAULT_SAMPLES: usize = 100_000;

/// How nearest-neighbour distances enter the Chamfer mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChamferConvention {
    /// Mean of squared distances.
    #[default]
    Squared,
    /// Mean of plain distances.
    Unsquared,
}

/// Squared distance from every point of `from` to its nearest point in `to`,
/// in input order.
fn nearest_squared(from: &[Point3], to: &PointIndex) -> Vec<f64> {
    from.par_iter().map(|p| to.nearest_distance_squared(p)).collect()
}

fn check(points: &[Point3]) -> Result<()> {
    if points.is_empty() {
        Err(GifsError::EmptyPointSet)
    } else {
        Ok(())
    }
}

/// Squared Chamfer distance: half the sum of both directional means.
pub fn chamfer(pred: &[Point3], gt: &[Point3]) -> Result<f64> {
    chamfer_with(pred, gt, ChamferConvention::Squared)
}

pub fn chamfer_with(pred: &[Point3], gt: &[Point3], convention: ChamferConvention) -> Result<f64> {
    check(pred)?;
    check(gt)?;
    let to_gt = nearest_squared(pred, &PointIndex::new(gt));
    let to_pred = nearest_squared(gt, &PointIndex::new(pred));
    let mean = |d: &[f64]| {
        let sum: f64 = match convention {
            ChamferConvention::Squared => d.iter().sum(),
            ChamferConvention::Unsquared => d.iter().map(|v| v.sqrt()).sum(),
        };
        sum / d.len() as f64
    };
    Ok(0.5 * (mean(&to_gt) + mean(&to_pred)))
}

/// Precision, recall and F-score (all in percent) at one threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FScore {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub fscore: f64,
}

pub fn fscore(pred: &[Point3], gt: &[Point3], threshold: f64) -> Result<f64> {
    Ok(fscore_detail(pred, gt, &[threshold])?[0].fscore)
}

/// F-scores at several thresholds from one pair of nearest-neighbour passes.
pub fn fscore_detail(pred: &[Point3], gt: &[Point3], thresholds: &[f64]) -> Result<Vec<FScore>> {
    check(pred)?;
    check(gt)?;
    if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(GifsError::InvalidConfig(format!("threshold must be positive, got {t}")));
    }
    let to_gt = nearest_squared(pred, &PointIndex::new(gt));
    let to_pred = nearest_squared(gt, &PointIndex::new(pred));
    Ok(thresholds.iter().map(|&t| score(&to_gt, &to_pred, t)).collect())
}

fn score(to_gt: &[f64], to_pred: &[f64], t: f64) -> FScore {
    let within = |d: &[f64]| 100.0 * d.iter().filter(|&&v| v.sqrt() <= t).count() as f64 / d.len() as f64;
    let precision = within(to_gt);
    let recall = within(to_pred);
    let fscore = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    FScore {
        threshold: t,
        precision,
        recall,
        fscore,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Chamfer distance in raw squared units.
    pub chamfer_mean: f64,
    /// The same value in units of 1e-4.
    pub chamfer_x1e4: f64,
    pub convention: ChamferConvention,
    /// F-score at 0.005, in percent.
    pub fscore_0005: Option<f64>,
    /// F-score at 0.01, in percent.
    pub fscore_001: Option<f64>,
    pub fscores: Vec<FScore>,
    pub samples: usize,
    pub seed: RngSeed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub samples: usize,
    pub thresholds: Vec<f64>,
    pub convention: ChamferConvention,
    pub seed: RngSeed,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            convention: ChamferConvention::Squared,
            seed: RngSeed(0),
        }
    }
}

/// Samples both surfaces and scores the predicted one against the
/// reference. Both meshes are sampled from the same random stream, so a mesh
/// compared with itself scores exactly 0 and 100.
pub fn evaluate_meshes(pred: &TriangleMesh, gt: &TriangleMesh, cfg: &EvalConfig) -> Result<MetricsReport> {
    let p = sample_surface(pred, cfg.samples, cfg.seed)?;
    let g = sample_surface(gt, cfg.samples, cfg.seed)?;
    evaluate_points(&p, &g, cfg)
}

pub fn evaluate_points(pred: &[Point3], gt: &[Point3], cfg: &EvalConfig) -> Result<MetricsReport> {
    let chamfer_mean = chamfer_with(pred, gt, cfg.convention)?;
    let fscores = fscore_detail(pred, gt, &cfg.thresholds)?;
    let at = |t: f64| fscores.iter().find(|f| f.threshold == t).map(|f| f.fscore);
    Ok(MetricsReport {
        chamfer_mean,
        chamfer_x1e4: chamfer_mean * 1e4,
        convention: cfg.convention,
        fscore_0005: at(0.005),
        fscore_001: at(0.01),
        fscores,
        samples: pred.len().min(gt.len()),
        seed: cfg.seed,
    })
}
