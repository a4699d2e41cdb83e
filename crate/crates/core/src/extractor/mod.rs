//! Surface extraction from a pair field: coarse-to-fine cube localization,
//! per-cube labeling from pairwise flags with Marching Cubes triangulation,
//! and distance-driven vertex refinement.

mod assignment;
mod locate;
mod mc;
mod refine;
pub mod tables;

use std::time::{Duration, Instant};

use log::info;
use serde::{Deserialize, Serialize};

pub use assignment::{solve_assignment, AssignmentProblem, PAIRS};
pub use locate::{locate_cubes, CubeIndex, LocatedCubes};
pub use mc::{adapted_marching_cubes, cube_problem};
pub use refine::{mean_surface_udf, refine_mesh};

use crate::fields::PairField;
use crate::geometry::{Point3, RngSeed, TriangleMesh};
use crate::{GifsError, Result};

/// Axis-aligned cubic region the extraction grid covers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub min: [f64; 3],
    pub size: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self {
            min: [-0.5; 3],
            size: 1.0,
        }
    }
}

impl Domain {
    pub fn origin(&self) -> Point3 {
        Point3::from(self.min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub initial_res: usize,
    /// Number of subdivision stages `T`.
    pub subdivisions: usize,
    pub tau: f64,
    /// Only used to report binarized flag statistics; the labeling consumes
    /// raw flag values.
    pub flag_binarize_threshold: f64,
    pub refine_iters: usize,
    pub refine_lr: f64,
    pub domain: Domain,
    pub seed: RngSeed,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            initial_res: 20,
            subdivisions: 3,
            tau: 2.0,
            flag_binarize_threshold: 0.5,
            refine_iters: 30,
            refine_lr: 2e-4,
            domain: Domain::default(),
            seed: RngSeed(0),
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GifsError::InvalidConfig(m.into()));
        if self.initial_res < 2 {
            return bad("initial_res must be at least 2");
        }
        if self.final_res() > (1 << 20) {
            return bad("final resolution too large");
        }
        if !(self.tau > 0.0) {
            return bad("tau must be positive");
        }
        if !(self.flag_binarize_threshold > 0.0 && self.flag_binarize_threshold < 1.0) {
            return bad("flag threshold must lie in (0, 1)");
        }
        if !(self.refine_lr > 0.0) || !self.refine_lr.is_finite() {
            return bad("refine_lr must be positive");
        }
        if !(self.domain.size > 0.0) || !self.domain.min.iter().all(|v| v.is_finite()) {
            return bad("domain must be a finite cube of positive size");
        }
        Ok(())
    }

    /// Cubes per axis at the final stage.
    pub fn final_res(&self) -> usize {
        self.initial_res.saturating_mul(1usize.checked_shl(self.subdivisions as u32).unwrap_or(usize::MAX))
    }

    /// Edge length of a final-stage cube.
    pub fn final_cube_size(&self) -> f64 {
        self.domain.size / self.final_res() as f64
    }
}

/// Intermediate results and timings of one extraction.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub located_cubes: usize,
    pub unrefined: TriangleMesh,
    pub mesh: TriangleMesh,
    pub locate_time: Duration,
    pub mc_time: Duration,
    pub refine_time: Duration,
}

/// Localization, triangulation and refinement in sequence.
pub fn extract<F: PairField + ?Sized>(field: &F, cfg: &ExtractionConfig) -> Result<TriangleMesh> {
    Ok(extract_detailed(field, cfg)?.mesh)
}

pub fn extract_detailed<F: PairField + ?Sized>(field: &F, cfg: &ExtractionConfig) -> Result<Extraction> {
    cfg.validate()?;
    let t0 = Instant::now();
    let located = locate_cubes(field, cfg)?;
    let t1 = Instant::now();
    let unrefined = adapted_marching_cubes(field, &located, cfg)?;
    let t2 = Instant::now();
    let mesh = refine_mesh(field, &unrefined, cfg)?;
    let t3 = Instant::now();
    info!(
        "extracted {} vertices, {} faces from {} cubes at {}^3",
        mesh.vertices.len(),
        mesh.faces.len(),
        located.cubes.len(),
        cfg.final_res()
    );
    Ok(Extraction {
        located_cubes: located.cubes.len(),
        unrefined,
        mesh,
        locate_time: t1 - t0,
        mc_time: t2 - t1,
        refine_time: t3 - t2,
    })
}
