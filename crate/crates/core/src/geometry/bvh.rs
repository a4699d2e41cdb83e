use super::query::{point_triangle_distance_squared, segment_touches_triangle};
use super::{Aabb, Point3, Segment, TriangleMesh, EPS_GEOM};
use crate::{GifsError, Result};

const LEAF_SIZE: usize = 4;

/// One node of the flattened tree. Leaves have `count > 0` and cover
/// `order[start..start + count]`; interior nodes keep their left child at
/// `self + 1` and their right child at `right`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvhNode {
    pub bounds: Aabb,
    pub start: u32,
    pub count: u32,
    pub right: u32,
}

impl BvhNode {
    pub fn is_leaf(&self) -> bool {
        self.count > 0
    }
}

/// Bounding volume hierarchy over the faces of a [`TriangleMesh`].
///
/// The tree does not own the mesh; every query takes the mesh it was built
/// from.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<BvhNode>,
    order: Vec<u32>,
}

impl Bvh {
    /// Median split on the longest centroid axis, leaves of at most four faces.
    pub fn build(mesh: &TriangleMesh) -> Result<Self> {
        if mesh.faces.is_empty() {
            return Err(GifsError::EmptyMesh);
        }
        let boxes: Vec<Aabb> = (0..mesh.faces.len()).map(|f| mesh.face_bounds(f)).collect();
        let centroids: Vec<Point3> = boxes.iter().map(Aabb::center).collect();
        let mut order: Vec<u32> = (0..mesh.faces.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * mesh.faces.len() / LEAF_SIZE + 1);
        build_recursive(&boxes, &centroids, &mut order, 0, &mut nodes);
        Ok(Self { nodes, order })
    }

    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    pub fn root_bounds(&self) -> Aabb {
        self.nodes[0].bounds
    }

    /// Faces of a leaf node, as indices into the mesh.
    pub fn leaf_faces(&self, node: &BvhNode) -> &[u32] {
        &self.order[node.start as usize..(node.start + node.count) as usize]
    }

    pub fn depth(&self) -> usize {
        fn depth_of(nodes: &[BvhNode], i: usize) -> usize {
            let n = &nodes[i];
            if n.is_leaf() {
                1
            } else {
                1 + depth_of(nodes, i + 1).max(depth_of(nodes, n.right as usize))
            }
        }
        depth_of(&self.nodes, 0)
    }

    /// True iff some point of `seg` lies on the mesh (closed, tolerance
    /// [`EPS_GEOM`]).
    pub fn segment_intersects(&self, mesh: &TriangleMesh, seg: &Segment) -> bool {
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if !segment_hits_box(seg, &node.bounds.padded(EPS_GEOM)) {
                continue;
            }
            if node.is_leaf() {
                for &f in self.leaf_faces(node) {
                    if segment_touches_triangle(seg, &mesh.triangle(f as usize)) {
                        return true;
                    }
                }
            } else {
                stack.push(node.right as usize);
                stack.push(i + 1);
            }
        }
        false
    }

    /// Distance from `p` to the closest point of the mesh, with that face.
    pub fn nearest(&self, mesh: &TriangleMesh, p: &Point3) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut best_face = usize::MAX;
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].bounds.distance_squared(p)));
        while let Some((i, d2)) = stack.pop() {
            if d2 > best {
                continue;
            }
            let node = &self.nodes[i];
            if node.is_leaf() {
                for &f in self.leaf_faces(node) {
                    let fd2 = point_triangle_distance_squared(p, &mesh.triangle(f as usize));
                    if fd2 < best || (fd2 == best && (f as usize) < best_face) {
                        best = fd2;
                        best_face = f as usize;
                    }
                }
            } else {
                let l = i + 1;
                let r = node.right as usize;
                let dl = self.nodes[l].bounds.distance_squared(p);
                let dr = self.nodes[r].bounds.distance_squared(p);
                // Push the farther child first so the nearer one is explored first.
                if dl <= dr {
                    stack.push((r, dr));
                    stack.push((l, dl));
                } else {
                    stack.push((l, dl));
                    stack.push((r, dr));
                }
            }
        }
        (best.sqrt(), best_face)
    }

    pub fn distance(&self, mesh: &TriangleMesh, p: &Point3) -> f64 {
        self.nearest(mesh, p).0
    }
}

fn build_recursive(
    boxes: &[Aabb],
    centroids: &[Point3],
    order: &mut [u32],
    start: usize,
    nodes: &mut Vec<BvhNode>,
) -> usize {
    let bounds = order
        .iter()
        .fold(Aabb::empty(), |b, &f| b.union(&boxes[f as usize]));
    let index = nodes.len();
    if order.len() <= LEAF_SIZE {
        nodes.push(BvhNode {
            bounds,
            start: start as u32,
            count: order.len() as u32,
            right: 0,
        });
        return index;
    }
    let cbounds = order
        .iter()
        .fold(Aabb::empty(), |b, &f| b.grow(&centroids[f as usize]));
    let axis = cbounds.longest_axis();
    order.sort_by(|&x, &y| {
        centroids[x as usize][axis]
            .total_cmp(&centroids[y as usize][axis])
            .then(x.cmp(&y))
    });
    let mid = order.len() / 2;
    nodes.push(BvhNode {
        bounds,
        start: 0,
        count: 0,
        right: 0,
    });
    let (left, right) = order.split_at_mut(mid);
    build_recursive(boxes, centroids, left, start, nodes);
    let r = build_recursive(boxes, centroids, right, start + mid, nodes);
    nodes[index].right = r as u32;
    index
}

/// Closed slab test.
fn segment_hits_box(seg: &Segment, b: &Aabb) -> bool {
    let d = seg.direction();
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for k in 0..3 {
        let o = seg.a[k];
        if d[k] == 0.0 {
            if o < b.min[k] || o > b.max[k] {
                return false;
            }
            continue;
        }
        let inv = 1.0 / d[k];
        let mut ta = (b.min[k] - o) * inv;
        let mut tb = (b.max[k] - o) * inv;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// Builds the acceleration structure for `mesh`.
pub fn build_bvh(mesh: &TriangleMesh) -> Result<Bvh> {
    Bvh::build(mesh)
}

pub fn segment_intersects(bvh: &Bvh, mesh: &TriangleMesh, seg: &Segment) -> bool {
    bvh.segment_intersects(mesh, seg)
}

/// The binary intersection flag of the segment `p1 p2` against the mesh.
pub fn ground_truth_flag(bvh: &Bvh, mesh: &TriangleMesh, p1: &Point3, p2: &Point3) -> u8 {
    // Canonical endpoint order keeps the result symmetric bit for bit.
    let (a, b) = if lexicographic_le(p1, p2) { (p1, p2) } else { (p2, p1) };
    bvh.segment_intersects(mesh, &Segment::new(*a, *b)) as u8
}

pub fn ground_truth_udf(bvh: &Bvh, mesh: &TriangleMesh, p: &Point3) -> f64 {
    bvh.distance(mesh, p)
}

fn lexicographic_le(a: &Point3, b: &Point3) -> bool {
    (a.x, a.y, a.z) <= (b.x, b.y, b.z)
}
