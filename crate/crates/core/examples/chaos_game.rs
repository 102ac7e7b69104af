//! Chaos game on the Cantor set and the classical tartan, with box-counting
//! dimensions.

use qifs::classical::{box_counting_dimension, chaos_game, geometric_scales, ChaosGameOptions, ClassicalIFS, Point};

fn main() -> qifs::Result<()> {
    let opts = ChaosGameOptions { resolution: 729, streams: 4, ..Default::default() };
    let scales = geometric_scales(3, 6);

    let cantor = chaos_game(&ClassicalIFS::cantor(), &Point::Line(0.5), 1_000_000, 1, &opts)?;
    let d = box_counting_dimension(&cantor.measure, &scales)?;
    println!("cantor: d = {:.4}  (ln2/ln3 = {:.4}), R² = {:.5}", d.dimension, 2f64.ln() / 3f64.ln(), d.r_squared);

    let tartan = chaos_game(&ClassicalIFS::tartan(), &Point::Plane([0.5, 0.5]), 1_000_000, 3, &opts)?;
    let d = box_counting_dimension(&tartan.measure, &scales)?;
    println!("tartan: d = {:.4}  (2ln2/ln3 = {:.4})", d.dimension, 2.0 * 2f64.ln() / 3f64.ln());
    for (inv_eps, boxes) in d.counts {
        println!("  1/ε = {inv_eps:>4}  boxes = {boxes}");
    }
    Ok(())
}
