use gifs::datagen::{generate_pairs, Dataset, SamplerConfig, TrainingPair};
use gifs::fields::{analytic_flag, analytic_udf, AnalyticShapeSpec, PairField};
use gifs::geometry::primitives::icosphere;
use gifs::learner::{
    read_model_from, train, write_model_to, FlagLoss, LearnedField, LossSettings, ModelConfig, ModelParams, TrainConfig,
    TRAIN_CHUNK,
};
use gifs::{GifsError, Point3, RngSeed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPHERE: AnalyticShapeSpec = AnalyticShapeSpec::SphereShell {
    center: [0.0; 3],
    radius: 0.3,
};

fn pairs(n: usize, seed: u64) -> Vec<TrainingPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = || [(); 3].map(|_| rng.random_range(-0.45f32..0.45));
    (0..n)
        .map(|_| {
            let (p1, p2) = (p(), p());
            let (a, b) = (to_point(p1), to_point(p2));
            TrainingPair {
                p1,
                p2,
                flag: analytic_flag(&SPHERE, &a, &b),
                udf1: analytic_udf(&SPHERE, &a) as f32,
                udf2: analytic_udf(&SPHERE, &b) as f32,
            }
        })
        .collect()
}

fn to_point(p: [f32; 3]) -> Point3 {
    Point3::new(p[0] as f64, p[1] as f64, p[2] as f64)
}

fn tiny_model(seed: u64) -> ModelParams<f64> {
    let mut params = ModelParams::<f64>::init(&ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(seed));
    // Predicted distances near 0.05 sit inside the band, where the clamp
    // passes gradient.
    let last = params.udf_mlp.biases.len() - 1;
    params.udf_mlp.biases[last][0] = -3.0;
    params
}

fn sphere_dataset(pairs: usize, seed: u64) -> Dataset {
    let cfg = SamplerConfig {
        pairs_per_shape: pairs,
        seed: RngSeed(seed),
        ..SamplerConfig::default()
    };
    generate_pairs(&icosphere(Point3::new(0.001, 0.002, -0.001), 0.4, 3), &cfg).unwrap()
}

/// Relative error, with entries far below the largest gradient compared
/// against that scale so rounding in the differences does not dominate.
fn relative_error(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3 * scale)
}

/// Analytic gradient against finite differences for every parameter. A
/// ReLU or max kink inside the stencil spoils a central difference, and
/// rounding spoils a tiny step, so each entry must agree with the central or
/// one-sided difference at one of three step sizes. A wrong gradient agrees
/// at none of them.
fn check_gradient(settings: &LossSettings) {
    let batch = pairs(24, 1);
    let mut params = tiny_model(2);
    let mut grad = params.zeros_like();
    params.loss_and_grad(&batch, settings, 5, &mut grad);
    let analytic: Vec<f64> = grad.tensors().iter().flat_map(|t| t.iter().copied()).collect();
    let scale = analytic.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    let rel = |a, b| relative_error(a, b, scale);
    let mid = params.loss(&batch, settings);
    let mut k = 0;
    let mut central_at_default = 0;
    for t in 0..params.tensors().len() {
        for i in 0..params.tensors()[t].len() {
            let orig = params.tensors()[t][i];
            let a = analytic[k];
            let mut ok = false;
            for h in [1e-6, 1e-5, 1e-7] {
                params.tensors_mut()[t][i] = orig + h;
                let up = params.loss(&batch, settings);
                params.tensors_mut()[t][i] = orig - h;
                let down = params.loss(&batch, settings);
                params.tensors_mut()[t][i] = orig;
                let central = (up - down) / (2.0 * h);
                if h == 1e-6 && rel(a, central) <= 1e-4 {
                    central_at_default += 1;
                }
                if [central, (up - mid) / h, (mid - down) / h].iter().any(|&n| rel(a, n) <= 1e-4) {
                    ok = true;
                    break;
                }
            }
            assert!(ok, "tensor {t} entry {i}: analytic {a} disagrees at every step");
            k += 1;
        }
    }
    assert_eq!(k, analytic.len());
    // Kinks are rare: almost every entry passes the plain central check.
    assert!(central_at_default * 100 >= 97 * k, "{central_at_default} of {k}");
}

#[test]
fn flag_loss_gradient_matches_finite_differences() {
    check_gradient(&LossSettings {
        lambda: 0.0,
        ..LossSettings::default()
    });
}

#[test]
fn batch_loss_gradient_matches_finite_differences() {
    check_gradient(&LossSettings::default());
}

#[test]
fn distance_loss_gradient_matches_finite_differences() {
    // With a huge weight the distance term dominates the tolerance scale.
    check_gradient(&LossSettings {
        lambda: 1e4,
        ..LossSettings::default()
    });
}

#[test]
fn cross_entropy_gradient_matches_finite_differences() {
    check_gradient(&LossSettings {
        flag_loss: FlagLoss::Bce,
        ..LossSettings::default()
    });
}

/// Zeroes the final layer so the output is the activated bias.
fn constant_output(params: &mut ModelParams<f64>, flag_logit: f64, udf_logit: f64) {
    for (mlp, bias) in [(&mut params.flag_mlp, flag_logit), (&mut params.udf_mlp, udf_logit)] {
        let last = mlp.weights.len() - 1;
        mlp.weights[last].fill(0.0);
        mlp.biases[last][0] = bias;
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn inverse_softplus(y: f64) -> f64 {
    y + (-(-y).exp_m1()).ln()
}

#[test]
fn loss_examples() {
    let mut params = tiny_model(3);
    constant_output(&mut params, logit(0.3), inverse_softplus(0.8));
    let (a, b) = (Point3::new(0.1, 0.0, 0.0), Point3::new(0.0, 0.2, 0.0));
    assert!((params.predict_flag(&a, &b) - 0.3).abs() < 1e-12);
    assert!((params.loss_flag(&a, &b, 0) - 0.3).abs() < 1e-12);
    assert!((params.loss_flag(&a, &b, 1) - 0.7).abs() < 1e-12);
    assert!((params.predict_udf(&a) - 0.8).abs() < 1e-12);
    assert_eq!(params.loss_udf(&a, 0.5, 0.1), 0.0);
    assert!((params.loss_udf(&a, 0.05, 0.1) - 0.05).abs() < 1e-12);
    constant_output(&mut params, logit(0.3), inverse_softplus(0.02));
    assert!((params.loss_udf(&a, 0.05, 0.1) - 0.03).abs() < 1e-12);

    let mut perfect = params.clone();
    constant_output(&mut perfect, -60.0, inverse_softplus(0.02));
    assert!(perfect.loss_flag(&a, &b, 0) < 1e-20);

    let pair = pairs(1, 4);
    let flag_only = LossSettings {
        lambda: 0.0,
        ..LossSettings::default()
    };
    let p = pair[0];
    assert!(
        (params.loss(&pair, &flag_only) - params.loss_flag(&p.point1(), &p.point2(), p.flag)).abs() < 1e-12
    );
}

#[test]
fn all_zero_loss_sums_to_zero() {
    let mut params = tiny_model(5);
    constant_output(&mut params, -60.0, inverse_softplus(0.5));
    let batch: Vec<TrainingPair> = pairs(50, 6)
        .into_iter()
        .map(|r| TrainingPair {
            flag: 0,
            udf1: 0.3,
            udf2: 0.4,
            ..r
        })
        .collect();
    assert!(params.loss(&batch, &LossSettings::default()) < 1e-20);
}

#[test]
fn chunking_does_not_change_the_gradient() {
    let batch = pairs(300, 7);
    let params = tiny_model(8);
    let settings = LossSettings::default();
    let mut a = params.zeros_like();
    let mut b = params.zeros_like();
    let la = params.loss_and_grad(&batch, &settings, 300, &mut a);
    let lb = params.loss_and_grad(&batch, &settings, TRAIN_CHUNK, &mut b);
    assert!((la - lb).abs() < 1e-9);
    for (x, y) in a.tensors().iter().zip(b.tensors()) {
        for (u, v) in x.iter().zip(y.iter()) {
            assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
        }
    }
}

#[test]
fn zero_epochs_returns_the_initialization() {
    let ds = sphere_dataset(2000, 1);
    let tcfg = TrainConfig {
        epochs: 0,
        seed: RngSeed(11),
        ..TrainConfig::default()
    };
    let mcfg = ModelConfig::tiny();
    let m = train(&ds, &tcfg, &mcfg).unwrap();
    assert_eq!(m.loss_trace.len(), 1);
    let init = ModelParams::<f32>::init(&mcfg, &mut tcfg.seed.rng());
    let last = init.udf_mlp.biases.len() - 1;
    assert_eq!(m.params.grids, init.grids);
    assert_eq!(m.params.flag_mlp, init.flag_mlp);
    assert_eq!(m.params.udf_mlp.weights, init.udf_mlp.weights);
    assert_eq!(m.params.udf_mlp.biases[..last], init.udf_mlp.biases[..last]);
}

#[test]
fn one_epoch_lowers_the_loss() {
    let ds = sphere_dataset(50_000, 2);
    let mut ratios: Vec<f64> = (0..5)
        .map(|s| {
            let tcfg = TrainConfig {
                epochs: 1,
                seed: RngSeed(s),
                ..TrainConfig::default()
            };
            let m = train(&ds, &tcfg, &ModelConfig::default()).unwrap();
            m.loss_trace[1] / m.loss_trace[0]
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    assert!(ratios[2] <= 1.0, "median ratio {}", ratios[2]);
}

#[test]
fn training_is_deterministic_and_thread_independent() {
    let ds = sphere_dataset(3000, 3);
    let tcfg = TrainConfig {
        epochs: 2,
        seed: RngSeed(5),
        ..TrainConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| train(&ds, &tcfg, &ModelConfig::tiny()).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.params, b.params);
    assert_eq!(a.loss_trace, b.loss_trace);
    let other = train(
        &ds,
        &TrainConfig {
            seed: RngSeed(6),
            ..tcfg.clone()
        },
        &ModelConfig::tiny(),
    )
    .unwrap();
    assert_ne!(a.params, other.params);
}

#[test]
fn model_file_round_trips() {
    let ds = sphere_dataset(1000, 4);
    let tcfg = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    let m = train(&ds, &tcfg, &ModelConfig::tiny()).unwrap();
    let mut bytes = Vec::new();
    write_model_to(&m.params, &mut bytes).unwrap();
    assert!(bytes.starts_with(b"GIFSMODL v001"));
    let back = read_model_from(&mut bytes.as_slice()).unwrap();
    assert_eq!(back, m.params);

    let cut = &bytes[..bytes.len() - 3];
    assert!(matches!(read_model_from(&mut &cut[..]), Err(GifsError::TruncatedFile(_))));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(read_model_from(&mut bad.as_slice()), Err(GifsError::FormatError(_))));
}

#[test]
fn divergence_is_reported() {
    let ds = sphere_dataset(2000, 5);
    let tcfg = TrainConfig {
        epochs: 3,
        lr: 1e30,
        ..TrainConfig::default()
    };
    assert!(matches!(
        train(&ds, &tcfg, &ModelConfig::tiny()),
        Err(GifsError::DivergedTraining { .. })
    ));
}

#[test]
fn invalid_training_config_is_rejected() {
    let ds = sphere_dataset(500, 6);
    for tcfg in [
        TrainConfig {
            lr: 0.0,
            ..TrainConfig::default()
        },
        TrainConfig {
            pairs_per_step: 0,
            ..TrainConfig::default()
        },
        TrainConfig {
            delta: -1.0,
            ..TrainConfig::default()
        },
    ] {
        assert!(matches!(train(&ds, &tcfg, &ModelConfig::tiny()), Err(GifsError::InvalidConfig(_))));
    }
}

fn point() -> impl Strategy<Value = Point3> {
    (-0.6f64..0.6, -0.6f64..0.6, -0.6f64..0.6).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn learned_flag_is_symmetric(a in point(), b in point(), seed in 0u64..50) {
        let params = ModelParams::<f32>::init(&ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(params.predict_flag(&a, &b), params.predict_flag(&b, &a));
        let field = LearnedField::new(params);
        prop_assert_eq!(field.flags(&[(a, b)]), field.flags(&[(b, a)]));
    }

    #[test]
    fn learned_distance_is_nonnegative(p in point(), seed in 0u64..50, scale in 0.1f64..100.0) {
        let mut params = ModelParams::<f64>::init(&ModelConfig::tiny(), &mut ChaCha8Rng::seed_from_u64(seed));
        for t in params.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= scale);
        }
        prop_assert!(params.predict_udf(&p) >= 0.0);
    }

    #[test]
    fn distance_loss_ignores_errors_beyond_delta(gt in 0.1f64..5.0, pred in 0.1f64..5.0) {
        let mut params = tiny_model(9);
        constant_output(&mut params, 0.0, inverse_softplus(pred));
        let p = Point3::origin();
        prop_assert_eq!(params.loss_udf(&p, gt, 0.1), 0.0);
    }

    #[test]
    fn losses_are_nonnegative(seed in 0u64..100) {
        let params = tiny_model(seed);
        let batch = pairs(8, seed);
        prop_assert!(params.loss(&batch, &LossSettings::default()) >= 0.0);
        for r in &batch {
            prop_assert!(params.loss_flag(&r.point1(), &r.point2(), r.flag) >= 0.0);
        }
    }
}

