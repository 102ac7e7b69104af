//! Iterating the Markov operator: measures for place-dependent Cantor weights
//! and densities for an invertible affine system.

use qifs::classical::{push_density, push_measure_n, ClassicalIFS, ClassicalMap, DensityGrid, EmpiricalMeasure, PhaseSpace};

fn main() -> qifs::Result<()> {
    let ifs = ClassicalIFS::cantor_place_dependent();
    let mut mu = EmpiricalMeasure::uniform(PhaseSpace::Interval, 729);
    for round in 0..3 {
        let next = push_measure_n(&ifs, &mu, 10)?;
        println!("after {:>2} steps: L1 change over the last 10 = {:.3e}", 10 * (round + 1), next.l1_distance(&mu)?);
        mu = next;
    }
    let w = mu.normalized();
    let left: f64 = w[..243].iter().sum();
    let right: f64 = w[486..].iter().sum();
    println!("mass on [0,1/3] = {left:.4}, on [2/3,1] = {right:.4}");

    // x ↦ x/2 and x ↦ x/2 + 1/2 keep Lebesgue measure invariant
    let maps = vec![ClassicalMap::Affine1D { a: 0.5, b: 0.0 }, ClassicalMap::Affine1D { a: 0.5, b: 0.5 }];
    let halves = ClassicalIFS::with_constant_probabilities(PhaseSpace::Interval, maps, &[0.5, 0.5])?;
    let mut g = DensityGrid::from_fn(400, |x| 2.0 * x)?;
    for _ in 0..8 {
        g = push_density(&halves, &g)?;
    }
    let spread = g.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max) - g.values().iter().cloned().fold(f64::INFINITY, f64::min);
    println!("density 2x after 8 steps: integral {:.6}, max − min {spread:.4}", g.integral());
    Ok(())
}
