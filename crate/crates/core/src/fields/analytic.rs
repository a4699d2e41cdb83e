use serde::{Deserialize, Serialize};

use super::{canonical_pair, PairField};
use crate::geometry::primitives::{disc_mesh, icosphere};
use crate::geometry::{Point3, TriangleMesh, Vec3};
use crate::{GifsError, Result};

/// Closed-form shapes with exact flags and distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticShapeSpec {
    /// A spherical shell (the surface only, no volume).
    SphereShell { center: [f64; 3], radius: f64 },
    /// Two concentric shells.
    DoubleSphere {
        center: [f64; 3],
        inner_radius: f64,
        outer_radius: f64,
    },
    /// A flat open disc.
    OpenDisc {
        center: [f64; 3],
        normal: [f64; 3],
        radius: f64,
    },
    /// Union of the children.
    Composite { children: Vec<AnalyticShapeSpec> },
}

impl AnalyticShapeSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match self {
            AnalyticShapeSpec::SphereShell { center, radius } => {
                if !finite(center) || !(*radius > 0.0) || !radius.is_finite() {
                    return Err(GifsError::InvalidConfig("sphere radius must be positive".into()));
                }
            }
            AnalyticShapeSpec::DoubleSphere {
                center,
                inner_radius,
                outer_radius,
            } => {
                if !finite(center) || !(*inner_radius > 0.0) || !(inner_radius < outer_radius) || !outer_radius.is_finite() {
                    return Err(GifsError::InvalidConfig(
                        "double sphere needs 0 < inner radius < outer radius".into(),
                    ));
                }
            }
            AnalyticShapeSpec::OpenDisc { center, normal, radius } => {
                if !finite(center) || !finite(normal) || Vec3::from(*normal).norm() == 0.0 {
                    return Err(GifsError::InvalidConfig("disc normal must be nonzero".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(GifsError::InvalidConfig("disc radius must be positive".into()));
                }
            }
            AnalyticShapeSpec::Composite { children } => {
                if children.is_empty() {
                    return Err(GifsError::InvalidConfig("composite has no children".into()));
                }
                for c in children {
                    c.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Number of elementary surfaces (a double sphere counts as two shells).
    pub fn primitive_count(&self) -> usize {
        match self {
            AnalyticShapeSpec::SphereShell { .. } | AnalyticShapeSpec::OpenDisc { .. } => 1,
            AnalyticShapeSpec::DoubleSphere { .. } => 2,
            AnalyticShapeSpec::Composite { children } => children.iter().map(Self::primitive_count).sum(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Triangulated approximation; `detail` controls icosphere depth and
    /// disc ring count.
    pub fn tessellate(&self, detail: u32) -> TriangleMesh {
        match self {
            AnalyticShapeSpec::SphereShell { center, radius } => icosphere(Point3::from(*center), *radius, detail),
            AnalyticShapeSpec::DoubleSphere {
                center,
                inner_radius,
                outer_radius,
            } => icosphere(Point3::from(*center), *inner_radius, detail)
                .merged(&icosphere(Point3::from(*center), *outer_radius, detail)),
            AnalyticShapeSpec::OpenDisc { center, normal, radius } => {
                let rings = 4usize << detail.min(8);
                disc_mesh(Point3::from(*center), Vec3::from(*normal), *radius, rings, 6 * rings)
            }
            AnalyticShapeSpec::Composite { children } => children
                .iter()
                .fold(TriangleMesh::empty(), |m, c| m.merged(&c.tessellate(detail))),
        }
    }
}

/// Does the closed segment `p1 p2` meet the sphere `|x - c| = r`?
fn segment_meets_sphere(p1: &Point3, p2: &Point3, c: &Point3, r: f64) -> bool {
    // f(t) = |p1 + t d - c|^2 - r^2 is a convex quadratic on [0, 1]: it has a
    // root iff its minimum is <= 0 and its larger endpoint value is >= 0.
    let d = p2 - p1;
    let m = p1 - c;
    let a = d.norm_squared();
    let b = 2.0 * d.dot(&m);
    let f0 = m.norm_squared() - r * r;
    let f1 = (p2 - c).norm_squared() - r * r;
    if f0.max(f1) < 0.0 {
        return false;
    }
    let fmin = if a > 0.0 {
        let t = (-b / (2.0 * a)).clamp(0.0, 1.0);
        let x = p1 + d * t;
        (x - c).norm_squared() - r * r
    } else {
        f0
    };
    fmin.min(f0).min(f1) <= 0.0
}

fn segment_meets_disc(p1: &Point3, p2: &Point3, c: &Point3, n: &Vec3, r: f64) -> bool {
    let da = n.dot(&(p1 - c));
    let db = n.dot(&(p2 - c));
    if (da > 0.0 && db > 0.0) || (da < 0.0 && db < 0.0) {
        return false;
    }
    if da == 0.0 && db == 0.0 {
        // In the disc's plane: the segment meets the disc iff it passes
        // within r of the center.
        let (x, _) = crate::geometry::query::closest_points_segments(p1, p2, c, c);
        return (x - c).norm() <= r;
    }
    let t = da / (da - db);
    let x = p1 + (p2 - p1) * t;
    (x - c).norm() <= r
}

fn disc_distance(p: &Point3, c: &Point3, n: &Vec3, r: f64) -> f64 {
    let v = p - c;
    let h = n.dot(&v);
    let rho = (v - n * h).norm();
    if rho <= r {
        h.abs()
    } else {
        ((rho - r).powi(2) + h * h).sqrt()
    }
}

/// Exact binary flag of a segment against an analytic shape.
pub fn analytic_flag(spec: &AnalyticShapeSpec, p1: &Point3, p2: &Point3) -> u8 {
    let (p1, p2) = canonical_pair(p1, p2);
    flag_ordered(spec, p1, p2) as u8
}

fn flag_ordered(spec: &AnalyticShapeSpec, p1: &Point3, p2: &Point3) -> bool {
    match spec {
        AnalyticShapeSpec::SphereShell { center, radius } => {
            segment_meets_sphere(p1, p2, &Point3::from(*center), *radius)
        }
        AnalyticShapeSpec::DoubleSphere {
            center,
            inner_radius,
            outer_radius,
        } => {
            let c = Point3::from(*center);
            segment_meets_sphere(p1, p2, &c, *inner_radius) || segment_meets_sphere(p1, p2, &c, *outer_radius)
        }
        AnalyticShapeSpec::OpenDisc { center, normal, radius } => {
            segment_meets_disc(p1, p2, &Point3::from(*center), &Vec3::from(*normal).normalize(), *radius)
        }
        AnalyticShapeSpec::Composite { children } => children.iter().any(|c| flag_ordered(c, p1, p2)),
    }
}

/// Exact unsigned distance to an analytic shape.
pub fn analytic_udf(spec: &AnalyticShapeSpec, p: &Point3) -> f64 {
    match spec {
        AnalyticShapeSpec::SphereShell { center, radius } => ((p - Point3::from(*center)).norm() - radius).abs(),
        AnalyticShapeSpec::DoubleSphere {
            center,
            inner_radius,
            outer_radius,
        } => {
            let d = (p - Point3::from(*center)).norm();
            (d - inner_radius).abs().min((d - outer_radius).abs())
        }
        AnalyticShapeSpec::OpenDisc { center, normal, radius } => {
            disc_distance(p, &Point3::from(*center), &Vec3::from(*normal).normalize(), *radius)
        }
        AnalyticShapeSpec::Composite { children } => children
            .iter()
            .map(|c| analytic_udf(c, p))
            .fold(f64::INFINITY, f64::min),
    }
}

/// [`PairField`] over a validated [`AnalyticShapeSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticField {
    spec: AnalyticShapeSpec,
}

impl AnalyticField {
    pub fn new(spec: AnalyticShapeSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &AnalyticShapeSpec {
        &self.spec
    }
}

impl PairField for AnalyticField {
    fn flag(&self, p1: &Point3, p2: &Point3) -> f64 {
        analytic_flag(&self.spec, p1, p2) as f64
    }

    fn udf(&self, p: &Point3) -> f64 {
        analytic_udf(&self.spec, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shell(r: f64) -> AnalyticShapeSpec {
        AnalyticShapeSpec::SphereShell {
            center: [0.0; 3],
            radius: r,
        }
    }

    fn double() -> AnalyticShapeSpec {
        AnalyticShapeSpec::DoubleSphere {
            center: [0.0; 3],
            inner_radius: 0.2,
            outer_radius: 0.4,
        }
    }

    fn disc() -> AnalyticShapeSpec {
        AnalyticShapeSpec::OpenDisc {
            center: [0.0; 3],
            normal: [0.0, 0.0, 1.0],
            radius: 0.3,
        }
    }

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn shell_flags() {
        let s = shell(0.4);
        assert_eq!(analytic_flag(&s, &p(0.0, 0.0, 0.0), &p(1.0, 0.0, 0.0)), 1);
        assert_eq!(analytic_flag(&s, &p(0.1, 0.0, 0.0), &p(0.0, 0.1, 0.0)), 0);
        // Both outside but the chord dips through the shell twice.
        assert_eq!(analytic_flag(&s, &p(-1.0, 0.0, 0.0), &p(1.0, 0.0, 0.0)), 1);
        // Both outside, passing by.
        assert_eq!(analytic_flag(&s, &p(-1.0, 0.5, 0.0), &p(1.0, 0.5, 0.0)), 0);
        // Tangent touch counts.
        assert_eq!(analytic_flag(&s, &p(-1.0, 0.4, 0.0), &p(1.0, 0.4, 0.0)), 1);
    }

    #[test]
    fn double_sphere_flags() {
        let d = double();
        assert_eq!(analytic_flag(&d, &p(0.0, 0.0, 0.0), &p(0.3, 0.0, 0.0)), 1);
        assert_eq!(analytic_flag(&d, &p(0.3, 0.0, 0.0), &p(0.5, 0.0, 0.0)), 1);
        assert_eq!(analytic_flag(&d, &p(0.0, 0.0, 0.0), &p(0.1, 0.0, 0.0)), 0);
        assert_eq!(analytic_flag(&d, &p(0.3, 0.0, 0.0), &p(0.0, 0.3, 0.0)), 0);
        // This chord passes 0.192 from the center, inside the inner shell.
        assert_eq!(analytic_flag(&d, &p(0.25, 0.0, 0.0), &p(0.0, 0.3, 0.0)), 1);
    }

    #[test]
    fn disc_flags() {
        let d = disc();
        assert_eq!(analytic_flag(&d, &p(0.1, 0.0, -0.1), &p(0.1, 0.0, 0.1)), 1);
        // Around the rim.
        assert_eq!(analytic_flag(&d, &p(0.5, 0.0, -0.1), &p(0.5, 0.0, 0.1)), 0);
        // Same side.
        assert_eq!(analytic_flag(&d, &p(0.1, 0.0, 0.1), &p(-0.1, 0.0, 0.2)), 0);
        // Coplanar through and beside the disc.
        assert_eq!(analytic_flag(&d, &p(-1.0, 0.0, 0.0), &p(1.0, 0.0, 0.0)), 1);
        assert_eq!(analytic_flag(&d, &p(-1.0, 0.5, 0.0), &p(1.0, 0.5, 0.0)), 0);
    }

    #[test]
    fn distances() {
        assert_eq!(analytic_udf(&shell(0.4), &Point3::origin()), 0.4);
        assert!((analytic_udf(&double(), &p(0.3, 0.0, 0.0)) - 0.1).abs() < 1e-15);
        let expected = (0.1f64 * 0.1 + 0.1 * 0.1).sqrt();
        assert!((analytic_udf(&disc(), &p(0.4, 0.0, 0.1)) - expected).abs() < 1e-15);
        assert!((analytic_udf(&disc(), &p(0.1, 0.1, -0.25)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn composite_is_union() {
        let c = AnalyticShapeSpec::Composite {
            children: vec![shell(0.1), disc()],
        };
        assert_eq!(analytic_flag(&c, &p(0.0, 0.0, 0.02), &p(0.05, 0.0, 0.02)), 0);
        assert_eq!(analytic_flag(&c, &p(0.0, 0.0, 0.0), &p(0.2, 0.0, 0.0)), 1);
        assert_eq!(analytic_flag(&c, &p(0.2, 0.0, -0.1), &p(0.2, 0.0, 0.1)), 1);
        assert!((analytic_udf(&c, &p(0.2, 0.0, 0.05)) - 0.05).abs() < 1e-15);
        assert_eq!(c.primitive_count(), 2);
    }

    #[test]
    fn validation() {
        assert!(shell(-1.0).validate().is_err());
        let bad = AnalyticShapeSpec::DoubleSphere {
            center: [0.0; 3],
            inner_radius: 0.4,
            outer_radius: 0.2,
        };
        assert!(bad.validate().is_err());
        let bad = AnalyticShapeSpec::OpenDisc {
            center: [0.0; 3],
            normal: [0.0; 3],
            radius: 0.2,
        };
        assert!(bad.validate().is_err());
        assert!(AnalyticShapeSpec::Composite { children: vec![] }.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = AnalyticShapeSpec::Composite {
            children: vec![double(), disc()],
        };
        let json = c.to_json().unwrap();
        assert!(json.contains("\"kind\": \"composite\""));
        assert_eq!(AnalyticShapeSpec::from_json(&json).unwrap(), c);
    }
}
