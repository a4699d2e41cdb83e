//! Labeled training pairs: Gaussian-displaced surface pairs plus uniform
//! free-space pairs, labeled with exact flags and distances.

mod format;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use format::{
    read_dataset, read_dataset_from, write_dataset, write_dataset_to, DATASET_MAGIC, DATASET_VERSION, RECORD_BYTES,
};

use crate::fields::MeshOracleField;
use crate::geometry::{Normalization, Point3, RngSeed, SurfaceSampler, TriangleMesh, Vec3};
use crate::{GifsError, Result};

/// Pairs generated per independent random stream.
const SHARD_PAIRS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub sigmas: Vec<f64>,
    pub grid_fraction: f64,
    pub pairs_per_shape: usize,
    pub seed: RngSeed,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![0.005, 0.01, 0.03],
            grid_fraction: 0.10,
            pairs_per_shape: 50_000,
            seed: RngSeed(0),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigmas.is_empty() || self.sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(GifsError::InvalidConfig("sigmas must be a nonempty list of positive values".into()));
        }
        if !(0.0..=1.0).contains(&self.grid_fraction) {
            return Err(GifsError::InvalidConfig("grid fraction must lie in [0, 1]".into()));
        }
        if self.pairs_per_shape == 0 {
            return Err(GifsError::InvalidConfig("pairs per shape must be at least 1".into()));
        }
        Ok(())
    }
}

/// One labeled pair, stored at single precision exactly as in the file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingPair {
    pub p1: [f32; 3],
    pub p2: [f32; 3],
    pub flag: u8,
    pub udf1: f32,
    pub udf2: f32,
}

impl TrainingPair {
    pub fn point1(&self) -> Point3 {
        to_point(self.p1)
    }

    pub fn point2(&self) -> Point3 {
        to_point(self.p2)
    }
}

fn to_point(p: [f32; 3]) -> Point3 {
    Point3::new(p[0] as f64, p[1] as f64, p[2] as f64)
}

fn to_f32(p: &Point3) -> [f32; 3] {
    [p.x as f32, p.y as f32, p.z as f32]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub format_version: u32,
    pub shape_id: String,
    pub normalization: Normalization,
    pub sampler: SamplerConfig,
    pub record_count: u64,
    /// How many records came from the uniform free-space branch.
    pub grid_pairs: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<TrainingPair>,
}

impl Dataset {
    pub fn with_shape(mut self, shape_id: impl Into<String>, normalization: Normalization) -> Self {
        self.header.shape_id = shape_id.into();
        self.header.normalization = normalization;
        self
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn positive_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.flag == 1).count() as f64 / self.records.len() as f64
    }
}

/// Generates `cfg.pairs_per_shape` labeled pairs for an already normalized
/// mesh. Each pair independently takes the free-space branch with
/// probability `cfg.grid_fraction`; otherwise both endpoints are Gaussian
/// displacements of one shared surface sample, with sigma drawn uniformly
/// from `cfg.sigmas`.
///
/// Endpoints are rounded to `f32` before labeling, so the stored labels are
/// exact for the stored coordinates. Output does not depend on the number of
/// worker threads.
pub fn generate_pairs(mesh: &TriangleMesh, cfg: &SamplerConfig) -> Result<Dataset> {
    cfg.validate()?;
    let sampler = SurfaceSampler::new(mesh)?;
    let oracle = MeshOracleField::new(mesh.clone())?;
    let shards = cfg.pairs_per_shape.div_ceil(SHARD_PAIRS);
    let parts: Vec<(Vec<TrainingPair>, u64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = SHARD_PAIRS.min(cfg.pairs_per_shape - shard * SHARD_PAIRS);
            let mut rng = cfg.seed.stream(shard as u64);
            let mut grid = 0u64;
            let records = (0..count)
                .map(|_| {
                    let (a, b) = if rng.random::<f64>() < cfg.grid_fraction {
                        grid += 1;
                        (uniform_point(&mut rng), uniform_point(&mut rng))
                    } else {
                        let (_, base) = sampler.sample(&mut rng);
                        let sigma = cfg.sigmas[rng.random_range(0..cfg.sigmas.len())];
                        (gaussian_offset(&mut rng, &base, sigma), gaussian_offset(&mut rng, &base, sigma))
                    };
                    label(&oracle, to_f32(&a), to_f32(&b))
                })
                .collect();
            (records, grid)
        })
        .collect();
    let grid_pairs = parts.iter().map(|(_, g)| g).sum();
    let records: Vec<TrainingPair> = parts.into_iter().flat_map(|(r, _)| r).collect();
    Ok(Dataset {
        header: DatasetHeader {
            format_version: DATASET_VERSION,
            shape_id: String::new(),
            normalization: Normalization::identity(),
            sampler: cfg.clone(),
            record_count: records.len() as u64,
            grid_pairs,
        },
        records,
    })
}

fn uniform_point<R: Rng>(rng: &mut R) -> Point3 {
    Point3::new(
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
    )
}

fn gaussian_offset<R: Rng>(rng: &mut R, base: &Point3, sigma: f64) -> Point3 {
    let n = Vec3::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    );
    base + n * sigma
}

fn label(oracle: &MeshOracleField, p1: [f32; 3], p2: [f32; 3]) -> TrainingPair {
    use crate::fields::PairField;
    let (a, b) = (to_point(p1), to_point(p2));
    TrainingPair {
        p1,
        p2,
        flag: oracle.exact_flag(&a, &b),
        udf1: oracle.udf(&a) as f32,
        udf2: oracle.udf(&b) as f32,
    }
}

/// Re-labels up to `max_checks` records (evenly strided; all of them when the
/// dataset is small enough) against the mesh and reports the first mismatch.
pub fn verify_dataset(ds: &Dataset, mesh: &TriangleMesh, max_checks: usize) -> Result<usize> {
    let oracle = MeshOracleField::new(mesh.clone())?;
    let stride = ds.records.len().div_ceil(max_checks.max(1)).max(1);
    let checked: Vec<usize> = (0..ds.records.len()).step_by(stride).collect();
    let bad = checked.par_iter().find_first(|&&i| {
        let r = &ds.records[i];
        let fresh = label(&oracle, r.p1, r.p2);
        fresh.flag != r.flag || fresh.udf1 != r.udf1 || fresh.udf2 != r.udf2
    });
    match bad {
        Some(&index) => Err(GifsError::CorruptRecord {
            index,
            reason: "label disagrees with the mesh".into(),
        }),
        None => Ok(checked.len()),
    }
}
