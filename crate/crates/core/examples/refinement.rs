//! Vertex refinement against an exact distance field.

use gifs::cli::demo_shape;
use gifs::extractor::{extract_detailed, mean_surface_udf, ExtractionConfig};
use gifs::fields::AnalyticField;
use gifs::RngSeed;

fn main() -> gifs::Result<()> {
    let field = AnalyticField::new(demo_shape("double-sphere")?)?;
    for iters in [0, 10, 30] {
        let cfg = ExtractionConfig {
            refine_iters: iters,
            ..ExtractionConfig::default()
        };
        let e = extract_detailed(&field, &cfg)?;
        let d = mean_surface_udf(&field, &e.mesh, 4, RngSeed(1));
        println!("{iters:2} iterations: mean surface distance {d:.3e}");
    }
    Ok(())
}
