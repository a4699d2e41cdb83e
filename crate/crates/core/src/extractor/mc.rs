use std::collections::HashMap;

use rayon::prelude::*;

use super::assignment::{solve_assignment, AssignmentProblem, PAIRS};
use super::locate::{CubeIndex, LocatedCubes};
use super::tables::{CORNERS, EDGES, TRI_TABLE};
use super::ExtractionConfig;
use crate::fields::PairField;
use crate::geometry::{Point3, TriangleMesh};
use crate::Result;

/// Cubes whose flags are queried in one batched call.
const CUBE_BATCH: usize = 512;

/// The 28 corner-pair flags of one cube.
pub fn cube_problem<F: PairField + ?Sized>(field: &F, located: &LocatedCubes, cube: &CubeIndex) -> AssignmentProblem {
    let pairs = cube_pairs(located, cube);
    let flags = field.flags(&pairs);
    let mut out = [0.0; 28];
    out.copy_from_slice(&flags);
    AssignmentProblem::new(out)
}

fn cube_pairs(located: &LocatedCubes, cube: &CubeIndex) -> Vec<(Point3, Point3)> {
    let corners: Vec<Point3> = CORNERS.iter().map(|&o| located.corner(cube, o)).collect();
    PAIRS.iter().map(|&(a, b)| (corners[a], corners[b])).collect()
}

/// Lattice edge from `p` one step along `axis`, packed into one integer.
fn edge_key(res: u64, p: [u64; 3], axis: u64) -> u64 {
    let n = res + 1;
    ((p[0] * n + p[1]) * n + p[2]) * 3 + axis
}

fn cube_edge_key(res: u64, cube: &CubeIndex, edge: usize) -> u64 {
    let (a, b) = EDGES[edge];
    let (ca, cb) = (CORNERS[a], CORNERS[b]);
    let mut p = [0u64; 3];
    let mut axis = 0;
    for d in 0..3 {
        p[d] = ca[d].min(cb[d]) as u64;
        if ca[d] != cb[d] {
            axis = d as u64;
        }
    }
    edge_key(res, [cube.i as u64 + p[0], cube.j as u64 + p[1], cube.k as u64 + p[2]], axis)
}

fn key_midpoint(located: &LocatedCubes, key: u64) -> Point3 {
    let n = located.res as u64 + 1;
    let axis = (key % 3) as usize;
    let mut rest = key / 3;
    let z = rest % n;
    rest /= n;
    let y = rest % n;
    let x = rest / n;
    let mut p = [x as f64, y as f64, z as f64];
    p[axis] += 0.5;
    let s = located.cube_size;
    Point3::new(
        located.origin.x + p[0] * s,
        located.origin.y + p[1] * s,
        located.origin.z + p[2] * s,
    )
}

/// Labels every located cube from its 28 flags, triangulates it with the
/// lookup table and welds vertices shared through lattice edges. Vertices
/// sit at edge midpoints.
pub fn adapted_marching_cubes<F: PairField + ?Sized>(
    field: &F,
    located: &LocatedCubes,
    cfg: &ExtractionConfig,
) -> Result<TriangleMesh> {
    cfg.validate()?;
    let res = located.res as u64;
    let per_batch: Vec<Vec<[u64; 3]>> = located
        .cubes
        .par_chunks(CUBE_BATCH)
        .map(|cubes| {
            let pairs: Vec<(Point3, Point3)> = cubes.iter().flat_map(|c| cube_pairs(located, c)).collect();
            let flags = field.flags(&pairs);
            let mut tris = Vec::new();
            for (cube, f) in cubes.iter().zip(flags.chunks_exact(28)) {
                let mut b = [0.0; 28];
                b.copy_from_slice(f);
                let (labels, _) = solve_assignment(&AssignmentProblem::new(b));
                let row = &TRI_TABLE[labels as usize];
                for t in row.chunks_exact(3).take_while(|t| t[0] != 255) {
                    tris.push([
                        cube_edge_key(res, cube, t[0] as usize),
                        cube_edge_key(res, cube, t[1] as usize),
                        cube_edge_key(res, cube, t[2] as usize),
                    ]);
                }
            }
            tris
        })
        .collect();

    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for tri in per_batch.iter().flatten() {
        let mut f = [0u32; 3];
        for (slot, &key) in f.iter_mut().zip(tri) {
            *slot = *ids.entry(key).or_insert_with(|| {
                vertices.push(key_midpoint(located, key));
                (vertices.len() - 1) as u32
            });
        }
        faces.push(f);
    }
    TriangleMesh::new(vertices, faces)
}
