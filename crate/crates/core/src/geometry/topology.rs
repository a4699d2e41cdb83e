//! Combinatorial checks on triangle meshes.

use std::collections::HashMap;

use super::TriangleMesh;

/// Edge and component statistics of a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologyReport {
    /// Vertices referenced by at least one face.
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// Edges used by exactly one face.
    pub boundary_edges: usize,
    /// Edges used by more than two faces.
    pub non_manifold_edges: usize,
    pub components: usize,
}

impl TopologyReport {
    /// `V - E + F` over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }

    pub fn is_closed_manifold(&self) -> bool {
        self.boundary_edges == 0 && self.non_manifold_edges == 0
    }
}

pub fn edge_face_counts(mesh: &TriangleMesh) -> HashMap<(u32, u32), u32> {
    let mut counts = HashMap::with_capacity(mesh.faces.len() * 3 / 2);
    for f in &mesh.faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}

pub fn analyze(mesh: &TriangleMesh) -> TopologyReport {
    let counts = edge_face_counts(mesh);
    let mut uf = UnionFind::new(mesh.vertices.len());
    let mut used = vec![false; mesh.vertices.len()];
    for f in &mesh.faces {
        for &v in f {
            used[v as usize] = true;
        }
        uf.union(f[0] as usize, f[1] as usize);
        uf.union(f[0] as usize, f[2] as usize);
    }
    let components = (0..mesh.vertices.len())
        .filter(|&v| used[v] && uf.find(v) == v)
        .count();
    TopologyReport {
        vertices: used.iter().filter(|&&u| u).count(),
        edges: counts.len(),
        faces: mesh.faces.len(),
        boundary_edges: counts.values().filter(|&&c| c == 1).count(),
        non_manifold_edges: counts.values().filter(|&&c| c > 2).count(),
        components,
    }
}

/// Face indices grouped by connected component (sharing a vertex connects).
pub fn components(mesh: &TriangleMesh) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(mesh.vertices.len());
    for f in &mesh.faces {
        uf.union(f[0] as usize, f[1] as usize);
        uf.union(f[0] as usize, f[2] as usize);
    }
    let mut groups: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (fi, f) in mesh.faces.iter().enumerate() {
        let root = uf.find(f[0] as usize);
        let g = *groups.entry(root).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[g].push(fi);
    }
    out
}

/// Sub-mesh made of the given faces, with vertices compacted.
pub fn submesh(mesh: &TriangleMesh, faces: &[usize]) -> TriangleMesh {
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut out = Vec::with_capacity(faces.len());
    for &fi in faces {
        let f = mesh.faces[fi].map(|v| {
            *remap.entry(v).or_insert_with(|| {
                vertices.push(mesh.vertices[v as usize]);
                (vertices.len() - 1) as u32
            })
        });
        out.push(f);
    }
    TriangleMesh { vertices, faces: out }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}
