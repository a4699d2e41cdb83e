use super::Point3;

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Static k-d tree for nearest-neighbour queries over a point set.
#[derive(Clone, Debug)]
pub struct PointIndex {
    points: Vec<Point3>,
    nodes: Vec<Node>,
}

impl PointIndex {
    pub fn new(points: &[Point3]) -> Self {
        let mut points = points.to_vec();
        let mut nodes = Vec::new();
        if !points.is_empty() {
            let n = points.len();
            build(&mut points, 0, n, &mut nodes);
        }
        Self { points, nodes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Squared distance from `q` to the nearest indexed point.
    /// Infinite for an empty index.
    pub fn nearest_distance_squared(&self, q: &Point3) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        self.search(0, q, &mut best);
        best
    }

    fn search(&self, node: usize, q: &Point3, best: &mut f64) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for p in &self.points[start..end] {
                    let d2 = (p - q).norm_squared();
                    if d2 < *best {
                        *best = d2;
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build(points: &mut [Point3], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let index = nodes.len();
    let slice = &mut points[start..end];
    if slice.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return index;
    }
    let mut lo = slice[0];
    let mut hi = slice[0];
    for p in slice.iter() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let axis = (hi - lo).imax();
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let value = slice[mid][axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    // Left holds coordinates <= value, right >= value: the query descends by
    // comparing against `value`, and the pruning bound covers both sides.
    let left = build(points, start, start + mid, nodes);
    let right = build(points, start + mid, end, nodes);
    nodes[index] = Node::Split { axis, value, left, right };
    index
}

/// Reference O(n) nearest-neighbour search.
#[cfg(test)]
fn naive_nearest_distance_squared(points: &[Point3], q: &Point3) -> f64 {
    points
        .iter()
        .map(|p| (p - q).norm_squared())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_naive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point3> = (0..2000)
            .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let index = PointIndex::new(&pts);
        for _ in 0..500 {
            let q = Point3::new(rng.random::<f64>() * 1.4 - 0.2, rng.random(), rng.random());
            assert_eq!(index.nearest_distance_squared(&q), naive_nearest_distance_squared(&pts, &q));
        }
    }

    #[test]
    fn duplicates_and_empty() {
        let pts = vec![Point3::new(1.0, 1.0, 1.0); 50];
        let index = PointIndex::new(&pts);
        assert_eq!(index.nearest_distance_squared(&Point3::new(1.0, 1.0, 2.0)), 1.0);
        assert!(PointIndex::new(&[]).nearest_distance_squared(&Point3::origin()).is_infinite());
    }
}
