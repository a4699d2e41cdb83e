//! Small procedural meshes used by demos, tests and evaluation.

use std::collections::HashMap;

use super::{Point3, TriangleMesh, Vec3};

/// Subdivided icosahedron projected onto a sphere. Depth `d` has `20 * 4^d`
/// faces.
pub fn icosphere(center: Point3, radius: f64, depth: u32) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| Vec3::new(v[0], v[1], v[2]).normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a as usize] + verts[b as usize]) * 0.5).normalize());
                (verts.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh {
        vertices: verts.iter().map(|v| center + v * radius).collect(),
        faces,
    }
}

/// Axis-aligned box surface (12 triangles).
pub fn box_mesh(min: Point3, max: Point3) -> TriangleMesh {
    let corner = |i: usize| {
        Point3::new(
            if i & 1 != 0 { max.x } else { min.x },
            if i & 2 != 0 { max.y } else { min.y },
            if i & 4 != 0 { max.z } else { min.z },
        )
    };
    let vertices = (0..8).map(corner).collect();
    let faces = vec![
        [0, 2, 1],
        [1, 2, 3],
        [4, 5, 6],
        [5, 7, 6],
        [0, 1, 4],
        [1, 5, 4],
        [2, 6, 3],
        [3, 6, 7],
        [0, 4, 2],
        [2, 4, 6],
        [1, 3, 5],
        [3, 7, 5],
    ];
    TriangleMesh { vertices, faces }
}

/// Square of side `size` centred at `center`, spanned by unit axes `u`, `v`,
/// split into two triangles.
pub fn quad_mesh(center: Point3, u: Vec3, v: Vec3, size: f64) -> TriangleMesh {
    let h = size * 0.5;
    let vertices = vec![
        center - u * h - v * h,
        center + u * h - v * h,
        center + u * h + v * h,
        center - u * h + v * h,
    ];
    TriangleMesh {
        vertices,
        faces: vec![[0, 1, 2], [0, 2, 3]],
    }
}

/// Regular grid of `n x n` quads over the same square as [`quad_mesh`].
pub fn grid_mesh(center: Point3, u: Vec3, v: Vec3, size: f64, n: usize) -> TriangleMesh {
    let n = n.max(1);
    let step = size / n as f64;
    let origin = center - u * (size * 0.5) - v * (size * 0.5);
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(origin + u * (i as f64 * step) + v * (j as f64 * step));
        }
    }
    let id = |i: usize, j: usize| (j * (n + 1) + i) as u32;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriangleMesh { vertices, faces }
}

/// Flat disc of radius `radius` triangulated as `rings` concentric rings of
/// `segments` sectors.
pub fn disc_mesh(center: Point3, normal: Vec3, radius: f64, rings: usize, segments: usize) -> TriangleMesh {
    let n = normal.normalize();
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = n.cross(&helper).normalize();
    let v = n.cross(&u);
    let rings = rings.max(1);
    let segments = segments.max(3);
    let mut vertices = vec![center];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..segments {
            let a = std::f64::consts::TAU * s as f64 / segments as f64;
            vertices.push(center + u * (rad * a.cos()) + v * (rad * a.sin()));
        }
    }
    let ring = |r: usize, s: usize| (1 + (r - 1) * segments + s % segments) as u32;
    let mut faces = Vec::new();
    for s in 0..segments {
        faces.push([0, ring(1, s), ring(1, s + 1)]);
    }
    for r in 2..=rings {
        for s in 0..segments {
            faces.push([ring(r - 1, s), ring(r, s), ring(r, s + 1)]);
            faces.push([ring(r - 1, s), ring(r, s + 1), ring(r - 1, s + 1)]);
        }
    }
    TriangleMesh { vertices, faces }
}
