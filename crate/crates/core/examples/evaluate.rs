//! Chamfer distance and F-score between meshes.

use gifs::geometry::primitives::icosphere;
use gifs::metrics::{evaluate_meshes, ChamferConvention, EvalConfig};
use gifs::Point3;

fn main() -> gifs::Result<()> {
    let gt = icosphere(Point3::origin(), 0.4, 5);
    let cfg = EvalConfig::default();
    for (label, pred) in [
        ("same mesh", gt.clone()),
        ("coarser", icosphere(Point3::origin(), 0.4, 2)),
        ("shifted 0.005", icosphere(Point3::new(0.005, 0.0, 0.0), 0.4, 5)),
        ("shifted 0.02", icosphere(Point3::new(0.02, 0.0, 0.0), 0.4, 5)),
    ] {
        let sq = evaluate_meshes(&pred, &gt, &cfg)?;
        let plain = evaluate_meshes(
            &pred,
            &gt,
            &EvalConfig {
                convention: ChamferConvention::Unsquared,
                ..cfg.clone()
            },
        )?;
        println!(
            "{label:14} chamfer {:.3e} (unsquared {:.3e}) F@0.005 {:6.2} F@0.01 {:6.2}",
            sq.chamfer_mean,
            plain.chamfer_mean,
            sq.fscore_0005.unwrap_or(0.0),
            sq.fscore_001.unwrap_or(0.0)
        );
    }
    Ok(())
}
