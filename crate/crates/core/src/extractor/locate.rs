use log::debug;

use super::ExtractionConfig;
use crate::fields::PairField;
use crate::geometry::Point3;
use crate::Result;

/// Integer position of a cube within one stage's grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeIndex {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl CubeIndex {
    pub fn new(i: u32, j: u32, k: u32) -> Self {
        Self { i, j, k }
    }

    fn children(self) -> impl Iterator<Item = CubeIndex> {
        (0..8u32).map(move |c| CubeIndex::new(2 * self.i + (c >> 2), 2 * self.j + ((c >> 1) & 1), 2 * self.k + (c & 1)))
    }
}

/// Final-stage cubes in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct LocatedCubes {
    /// Cubes per axis.
    pub res: usize,
    pub cube_size: f64,
    pub origin: Point3,
    pub cubes: Vec<CubeIndex>,
}

impl LocatedCubes {
    pub fn corner(&self, c: &CubeIndex, offset: [u32; 3]) -> Point3 {
        let s = self.cube_size;
        Point3::new(
            self.origin.x + (c.i + offset[0]) as f64 * s,
            self.origin.y + (c.j + offset[1]) as f64 * s,
            self.origin.z + (c.k + offset[2]) as f64 * s,
        )
    }

    pub fn center(&self, c: &CubeIndex) -> Point3 {
        let s = self.cube_size;
        Point3::new(
            self.origin.x + (c.i as f64 + 0.5) * s,
            self.origin.y + (c.j as f64 + 0.5) * s,
            self.origin.z + (c.k as f64 + 0.5) * s,
        )
    }
}

/// Starting from every initial cube, `subdivisions` times keep the cubes
/// whose center distance is below `tau` cube sizes and split them in eight.
pub fn locate_cubes<F: PairField + ?Sized>(field: &F, cfg: &ExtractionConfig) -> Result<LocatedCubes> {
    cfg.validate()?;
    let n = cfg.initial_res as u32;
    let mut level = LocatedCubes {
        res: cfg.initial_res,
        cube_size: cfg.domain.size / cfg.initial_res as f64,
        origin: cfg.domain.origin(),
        cubes: Vec::with_capacity((n * n * n) as usize),
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                level.cubes.push(CubeIndex::new(i, j, k));
            }
        }
    }
    for stage in 0..cfg.subdivisions {
        let centers: Vec<Point3> = level.cubes.iter().map(|c| level.center(c)).collect();
        let udf = field.udfs(&centers);
        let limit = level.cube_size * cfg.tau;
        let kept = level.cubes.iter().zip(&udf).filter(|(_, &u)| u < limit).map(|(c, _)| *c);
        let mut next: Vec<CubeIndex> = kept.flat_map(CubeIndex::children).collect();
        next.sort_unstable();
        debug!("stage {stage}: {} of {} cubes kept", next.len() / 8, level.cubes.len());
        level = LocatedCubes {
            res: level.res * 2,
            cube_size: level.cube_size / 2.0,
            origin: level.origin,
            cubes: next,
        };
    }
    Ok(level)
}
