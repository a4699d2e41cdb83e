//! The pair-field abstraction: `flag(p1, p2)` and `udf(p)`.

mod analytic;
mod oracle;

use rayon::prelude::*;

pub use analytic::{analytic_flag, analytic_udf, AnalyticField, AnalyticShapeSpec};
pub use oracle::{mesh_oracle_field, MeshOracleField};

use crate::geometry::Point3;

/// A shape queried through pairwise intersection flags and unsigned distance.
///
/// `flag` returns a value in `[0, 1]` (exact backends return 0 or 1) and must
/// be symmetric in its arguments; `udf` is nonnegative.
///
/// The batched calls have the same semantics as the scalar ones and preserve
/// input order. Backends with a cheaper batched path override them.
pub trait PairField: Sync {
    fn flag(&self, p1: &Point3, p2: &Point3) -> f64;

    fn udf(&self, p: &Point3) -> f64;

    fn flags(&self, pairs: &[(Point3, Point3)]) -> Vec<f64> {
        pairs.par_iter().map(|(a, b)| self.flag(a, b)).collect()
    }

    fn udfs(&self, points: &[Point3]) -> Vec<f64> {
        points.par_iter().map(|p| self.udf(p)).collect()
    }
}

impl<F: PairField + ?Sized> PairField for &F {
    fn flag(&self, p1: &Point3, p2: &Point3) -> f64 {
        (**self).flag(p1, p2)
    }

    fn udf(&self, p: &Point3) -> f64 {
        (**self).udf(p)
    }

    fn flags(&self, pairs: &[(Point3, Point3)]) -> Vec<f64> {
        (**self).flags(pairs)
    }

    fn udfs(&self, points: &[Point3]) -> Vec<f64> {
        (**self).udfs(points)
    }
}

impl<F: PairField + ?Sized> PairField for Box<F> {
    fn flag(&self, p1: &Point3, p2: &Point3) -> f64 {
        (**self).flag(p1, p2)
    }

    fn udf(&self, p: &Point3) -> f64 {
        (**self).udf(p)
    }

    fn flags(&self, pairs: &[(Point3, Point3)]) -> Vec<f64> {
        (**self).flags(pairs)
    }

    fn udfs(&self, points: &[Point3]) -> Vec<f64> {
        (**self).udfs(points)
    }
}

/// A field with no surface: every flag is 0 and every distance is `distance`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantField {
    pub distance: f64,
}

impl PairField for ConstantField {
    fn flag(&self, _: &Point3, _: &Point3) -> f64 {
        0.0
    }

    fn udf(&self, _: &Point3) -> f64 {
        self.distance
    }
}

/// Orders two endpoints canonically so that exact flags are bitwise symmetric.
pub(crate) fn canonical_pair<'a>(p1: &'a Point3, p2: &'a Point3) -> (&'a Point3, &'a Point3) {
    if (p1.x, p1.y, p1.z) <= (p2.x, p2.y, p2.z) {
        (p1, p2)
    } else {
        (p2, p1)
    }
}
