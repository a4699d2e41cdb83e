use gifs::fields::{analytic_flag, analytic_udf, AnalyticField, AnalyticShapeSpec, ConstantField, MeshOracleField, PairField};
use gifs::geometry::primitives::icosphere;
use gifs::geometry::{build_bvh, ground_truth_flag, ground_truth_udf};
use gifs::Point3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sphere(r: f64) -> AnalyticShapeSpec {
    AnalyticShapeSpec::SphereShell {
        center: [0.0; 3],
        radius: r,
    }
}

fn random_pairs(n: usize, seed: u64) -> Vec<(Point3, Point3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = || Point3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
    (0..n).map(|_| (p(), p())).collect()
}

fn shapes() -> Vec<AnalyticShapeSpec> {
    vec![
        sphere(0.4),
        AnalyticShapeSpec::DoubleSphere {
            center: [0.01, 0.0, 0.0],
            inner_radius: 0.2,
            outer_radius: 0.4,
        },
        AnalyticShapeSpec::OpenDisc {
            center: [0.0, 0.0, 0.02],
            normal: [0.0, 0.3, 1.0],
            radius: 0.3,
        },
        AnalyticShapeSpec::Composite {
            children: vec![
                sphere(0.15),
                AnalyticShapeSpec::OpenDisc {
                    center: [0.0, 0.0, -0.3],
                    normal: [0.0, 0.0, 1.0],
                    radius: 0.4,
                },
            ],
        },
    ]
}

#[test]
fn spec_examples() {
    let s = sphere(0.4);
    let o = Point3::origin();
    assert_eq!(analytic_flag(&s, &o, &Point3::new(1.0, 0.0, 0.0)), 1);
    assert_eq!(analytic_flag(&s, &Point3::new(0.1, 0.0, 0.0), &Point3::new(0.0, 0.1, 0.0)), 0);
    let d = &shapes()[1];
    let d = match d {
        AnalyticShapeSpec::DoubleSphere { .. } => AnalyticShapeSpec::DoubleSphere {
            center: [0.0; 3],
            inner_radius: 0.2,
            outer_radius: 0.4,
        },
        _ => unreachable!(),
    };
    assert_eq!(analytic_flag(&d, &o, &Point3::new(0.3, 0.0, 0.0)), 1);
    assert_eq!(analytic_flag(&d, &Point3::new(0.3, 0.0, 0.0), &Point3::new(0.5, 0.0, 0.0)), 1);
    assert_eq!(analytic_flag(&d, &o, &Point3::new(0.1, 0.0, 0.0)), 0);
    assert_eq!(analytic_udf(&s, &Point3::new(0.0, 0.0, 0.1)), 0.30000000000000004);
}

#[test]
fn every_backend_is_symmetric() {
    let pairs = random_pairs(10_000, 1);
    let swapped: Vec<_> = pairs.iter().map(|(a, b)| (*b, *a)).collect();
    for spec in shapes() {
        let f = AnalyticField::new(spec.clone()).unwrap();
        assert_eq!(f.flags(&pairs), f.flags(&swapped), "{spec:?}");
        let m = MeshOracleField::new(spec.tessellate(2)).unwrap();
        assert_eq!(m.flags(&pairs), m.flags(&swapped), "{spec:?} mesh");
    }
}

#[test]
fn oracle_matches_analytic_sphere() {
    let spec = sphere(0.4);
    let field = AnalyticField::new(spec.clone()).unwrap();
    let oracle = MeshOracleField::new(icosphere(Point3::origin(), 0.4, 4)).unwrap();
    let pairs = random_pairs(10_000, 2);
    let a = field.flags(&pairs);
    let b = oracle.flags(&pairs);
    let agree = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    assert!(agree as f64 >= 0.995 * pairs.len() as f64, "agreement {agree}");
}

#[test]
fn oracle_delegates_to_ground_truth() {
    let mesh = icosphere(Point3::new(0.02, 0.0, 0.0), 0.3, 3);
    let bvh = build_bvh(&mesh).unwrap();
    let field = MeshOracleField::new(mesh.clone()).unwrap();
    for (a, b) in random_pairs(2000, 3) {
        assert_eq!(field.flag(&a, &b), ground_truth_flag(&bvh, &mesh, &a, &b) as f64);
        assert_eq!(field.udf(&a), ground_truth_udf(&bvh, &mesh, &a));
    }
}

#[test]
fn composite_is_union_of_children() {
    let spec = shapes().pop().unwrap();
    let children = match &spec {
        AnalyticShapeSpec::Composite { children } => children.clone(),
        _ => unreachable!(),
    };
    for (a, b) in random_pairs(5000, 4) {
        let max = children.iter().map(|c| analytic_flag(c, &a, &b)).max().unwrap();
        assert_eq!(analytic_flag(&spec, &a, &b), max);
        let min = children.iter().map(|c| analytic_udf(c, &a)).fold(f64::INFINITY, f64::min);
        assert_eq!(analytic_udf(&spec, &a), min);
    }
}

#[test]
fn batched_queries_preserve_order() {
    let f = AnalyticField::new(sphere(0.3)).unwrap();
    let pairs = random_pairs(500, 5);
    let scalar: Vec<f64> = pairs.iter().map(|(a, b)| f.flag(a, b)).collect();
    assert_eq!(f.flags(&pairs), scalar);
    let points: Vec<Point3> = pairs.iter().map(|p| p.0).collect();
    let scalar: Vec<f64> = points.iter().map(|p| f.udf(p)).collect();
    assert_eq!(f.udfs(&points), scalar);
}

#[test]
fn constant_field_has_no_surface() {
    let f = ConstantField { distance: 1.0 };
    let (a, b) = random_pairs(1, 6)[0];
    assert_eq!(f.flag(&a, &b), 0.0);
    assert_eq!(f.udf(&a), 1.0);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(AnalyticField::new(sphere(-0.1)).is_err());
    let bad = AnalyticShapeSpec::DoubleSphere {
        center: [0.0; 3],
        inner_radius: 0.4,
        outer_radius: 0.2,
    };
    assert!(AnalyticField::new(bad).is_err());
    let bad = AnalyticShapeSpec::OpenDisc {
        center: [0.0; 3],
        normal: [0.0; 3],
        radius: 0.2,
    };
    assert!(AnalyticField::new(bad).is_err());
}

fn coord() -> impl Strategy<Value = f64> {
    -0.6f64..0.6
}

fn point() -> impl Strategy<Value = Point3> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

proptest! {
    #[test]
    fn flag_of_point_with_itself_is_zero_off_surface(p in point()) {
        for spec in shapes() {
            prop_assume!(analytic_udf(&spec, &p) > 0.0);
            prop_assert_eq!(analytic_flag(&spec, &p, &p), 0);
        }
    }

    #[test]
    fn distance_is_nonnegative(p in point()) {
        for spec in shapes() {
            prop_assert!(analytic_udf(&spec, &p) >= 0.0);
        }
    }

    #[test]
    fn far_apart_udf_bounds_flag(a in point(), b in point()) {
        // A segment shorter than both endpoint distances cannot reach the surface.
        for spec in shapes() {
            let len = (a - b).norm();
            if len < analytic_udf(&spec, &a) && len < analytic_udf(&spec, &b) {
                prop_assert_eq!(analytic_flag(&spec, &a, &b), 0);
            }
        }
    }

    #[test]
    fn spec_json_round_trips(r in 0.01f64..0.45, x in -0.1f64..0.1) {
        let spec = AnalyticShapeSpec::Composite { children: vec![
            AnalyticShapeSpec::SphereShell { center: [x, 0.0, 0.0], radius: r },
            AnalyticShapeSpec::OpenDisc { center: [0.0, x, 0.0], normal: [0.0, 0.0, 1.0], radius: r },
        ]};
        prop_assert_eq!(AnalyticShapeSpec::from_json(&spec.to_json().unwrap()).unwrap(), spec);
    }
}
