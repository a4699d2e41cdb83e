//! Primitive point/segment/triangle queries and their naive whole-mesh loops.
//!
//! The naive loops are the reference the BVH is checked against.

use super::{Point3, Segment, TriangleMesh, EPS_GEOM};

/// Closest point on triangle `abc` to `p` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom == 0.0 || !denom.is_finite() {
        // Zero-area triangle: fall back to its three edges.
        let cands = [
            closest_points_segments(p, p, a, b).1,
            closest_points_segments(p, p, b, c).1,
            closest_points_segments(p, p, c, a).1,
        ];
        return cands
            .into_iter()
            .min_by(|x, y| (x - p).norm_squared().total_cmp(&(y - p).norm_squared()))
            .unwrap();
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance_squared(p: &Point3, tri: &[Point3; 3]) -> f64 {
    (closest_point_on_triangle(p, &tri[0], &tri[1], &tri[2]) - p).norm_squared()
}

/// Closest points between segments `p1q1` and `p2q2`; either may be degenerate.
pub fn closest_points_segments(p1: &Point3, q1: &Point3, p2: &Point3, q2: &Point3) -> (Point3, Point3) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::MIN_POSITIVE && e <= f64::MIN_POSITIVE {
        return (*p1, *p2);
    }
    if a <= f64::MIN_POSITIVE {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::MIN_POSITIVE {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

/// Distance between a closed segment and a closed triangle.
pub fn segment_triangle_distance(seg: &Segment, tri: &[Point3; 3]) -> f64 {
    if crosses_interior(seg, tri) {
        return 0.0;
    }
    let [a, b, c] = tri;
    let mut d2 = point_triangle_distance_squared(&seg.a, tri).min(point_triangle_distance_squared(&seg.b, tri));
    for (u, v) in [(a, b), (b, c), (c, a)] {
        let (x, y) = closest_points_segments(&seg.a, &seg.b, u, v);
        d2 = d2.min((x - y).norm_squared());
    }
    d2.sqrt()
}

/// True when the segment pierces the triangle's plane strictly between its
/// endpoints at a point inside the (closed) triangle.
fn crosses_interior(seg: &Segment, tri: &[Point3; 3]) -> bool {
    let [a, b, c] = tri;
    let n = (b - a).cross(&(c - a));
    let da = n.dot(&(seg.a - a));
    let db = n.dot(&(seg.b - a));
    if !((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
        return false;
    }
    let t = da / (da - db);
    let x = seg.point_at(t);
    n.dot(&(b - a).cross(&(x - a))) >= 0.0
        && n.dot(&(c - b).cross(&(x - b))) >= 0.0
        && n.dot(&(a - c).cross(&(x - c))) >= 0.0
}

/// Closed-set segment/triangle test with tolerance [`EPS_GEOM`].
pub fn segment_touches_triangle(seg: &Segment, tri: &[Point3; 3]) -> bool {
    let [a, b, c] = tri;
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len > 0.0 {
        let da = n.dot(&(seg.a - a)) / len;
        let db = n.dot(&(seg.b - a)) / len;
        if (da > EPS_GEOM && db > EPS_GEOM) || (da < -EPS_GEOM && db < -EPS_GEOM) {
            return false;
        }
    }
    segment_triangle_distance(seg, tri) <= EPS_GEOM
}

/// Reference intersection test: every triangle, no acceleration.
pub fn naive_segment_intersects(mesh: &TriangleMesh, seg: &Segment) -> bool {
    mesh.triangles().any(|tri| segment_touches_triangle(seg, &tri))
}

/// Reference unsigned distance: minimum over every triangle.
pub fn naive_distance(mesh: &TriangleMesh, p: &Point3) -> f64 {
    mesh.triangles()
        .map(|tri| point_triangle_distance_squared(p, &tri))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}
