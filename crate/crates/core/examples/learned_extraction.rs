//! Extracting a mesh from a trained model and scoring it.

use gifs::cli::{demo_shape, DEMO_TESSELLATION};
use gifs::datagen::{generate_pairs, SamplerConfig};
use gifs::extractor::{extract_detailed, ExtractionConfig};
use gifs::fields::AnalyticField;
use gifs::geometry::topology::analyze;
use gifs::learner::{read_model, train, LearnedField, ModelConfig, TrainConfig};
use gifs::metrics::{evaluate_meshes, EvalConfig};

fn main() -> gifs::Result<()> {
    let spec = demo_shape("sphere")?;
    let mesh = spec.tessellate(DEMO_TESSELLATION);
    // Reuse the model from the training example when it exists.
    let path = std::env::temp_dir().join("sphere.gifs");
    let params = match read_model(&path) {
        Ok(p) => p,
        Err(_) => {
            let ds = generate_pairs(&mesh, &SamplerConfig::default())?;
            let tcfg = TrainConfig {
                epochs: 3,
                ..TrainConfig::default()
            };
            train(&ds, &tcfg, &ModelConfig::default())?.params
        }
    };
    let cfg = ExtractionConfig {
        initial_res: 10,
        ..ExtractionConfig::default()
    };
    let learned = extract_detailed(&LearnedField::new(params), &cfg)?;
    let exact = extract_detailed(&AnalyticField::new(spec)?, &cfg)?;
    let eval = EvalConfig::default();
    for (name, e) in [("learned", &learned), ("exact", &exact)] {
        let topo = analyze(&e.mesh);
        let m = evaluate_meshes(&e.mesh, &mesh, &eval)?;
        println!(
            "{name:8} {:6} faces {:3} components chamfer {:.3e} F@0.01 {:.2}",
            topo.faces,
            topo.components,
            m.chamfer_mean,
            m.fscore_001.unwrap_or(0.0)
        );
    }
    Ok(())
}
