//! Sampling labelled point pairs around a mesh and storing them.

use gifs::cli::{demo_shape, DEMO_TESSELLATION};
use gifs::datagen::{generate_pairs, read_dataset, verify_dataset, write_dataset, SamplerConfig};

fn main() -> gifs::Result<()> {
    let mesh = demo_shape("open-disc")?.tessellate(DEMO_TESSELLATION);
    let cfg = SamplerConfig::default();
    let ds = generate_pairs(&mesh, &cfg)?;
    println!(
        "{} pairs, {} free-space, positive rate {:.3}",
        ds.len(),
        ds.header.grid_pairs,
        ds.positive_rate()
    );
    for sigma in &cfg.sigmas {
        let one = SamplerConfig {
            sigmas: vec![*sigma],
            grid_fraction: 0.0,
            pairs_per_shape: 10_000,
            ..cfg.clone()
        };
        println!("sigma {sigma}: positive rate {:.3}", generate_pairs(&mesh, &one)?.positive_rate());
    }
    let path = std::env::temp_dir().join("open-disc.pairs");
    write_dataset(&ds, &path)?;
    let back = read_dataset(&path)?;
    println!("round trip equal: {}", back == ds);
    println!("re-verified {} records against the mesh", verify_dataset(&back, &mesh, 1000)?);
    Ok(())
}
