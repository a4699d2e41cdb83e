//! Exact flags and distances against a triangle mesh.

use gifs::geometry::primitives::{grid_mesh, icosphere};
use gifs::geometry::{build_bvh, ground_truth_flag, ground_truth_udf};
use gifs::{Point3, Vec3};

fn main() -> gifs::Result<()> {
    let sphere = icosphere(Point3::origin(), 0.4, 4);
    let bvh = build_bvh(&sphere)?;
    let inside = Point3::new(0.1, 0.0, 0.0);
    let outside = Point3::new(0.45, 0.1, 0.0);
    println!("sphere: {} faces, {} BVH nodes", sphere.faces.len(), bvh.nodes().len());
    println!("flag(inside, outside) = {}", ground_truth_flag(&bvh, &sphere, &inside, &outside));
    println!("flag(inside, origin)  = {}", ground_truth_flag(&bvh, &sphere, &inside, &Point3::origin()));
    println!("udf(inside)  = {:.4}", ground_truth_udf(&bvh, &sphere, &inside));
    println!("udf(outside) = {:.4}", ground_truth_udf(&bvh, &sphere, &outside));

    // A single wall: a and c share a side, b does not.
    let wall = grid_mesh(Point3::origin(), Vec3::y(), Vec3::z(), 0.8, 2);
    let wb = build_bvh(&wall)?;
    let (a, b, c) = (Point3::new(-0.2, 0.0, 0.0), Point3::new(0.2, 0.1, 0.0), Point3::new(-0.1, -0.1, 0.1));
    println!(
        "wall flags: ab {} bc {} ac {} (not transitive)",
        ground_truth_flag(&wb, &wall, &a, &b),
        ground_truth_flag(&wb, &wall, &b, &c),
        ground_truth_flag(&wb, &wall, &a, &c)
    );
    Ok(())
}
