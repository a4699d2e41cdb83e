//! Fitting feature grids and both decoders to one shape's pairs.

use gifs::cli::{demo_shape, DEMO_TESSELLATION};
use gifs::datagen::{generate_pairs, SamplerConfig};
use gifs::learner::{evaluate_accuracy, train_with, write_model, ModelConfig, TrainConfig};
use gifs::RngSeed;

fn main() -> gifs::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mesh = demo_shape("sphere")?.tessellate(DEMO_TESSELLATION);
    let train_set = generate_pairs(&mesh, &SamplerConfig::default())?;
    let held_out = generate_pairs(
        &mesh,
        &SamplerConfig {
            pairs_per_shape: 5000,
            seed: RngSeed(1),
            ..SamplerConfig::default()
        },
    )?;
    let tcfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let model = train_with(&train_set, &tcfg, &ModelConfig::default(), |epoch, params, loss| {
        let (acc, mae) = evaluate_accuracy(params, &held_out.records, 0.5, tcfg.delta);
        println!("epoch {epoch:3}: loss {loss:.4}, held-out accuracy {acc:.3}, distance MAE {mae:.5}");
    })?;
    let path = std::env::temp_dir().join("sphere.gifs");
    write_model(&model.params, &path)?;
    println!("model written to {}", path.display());
    Ok(())
}
