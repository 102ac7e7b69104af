use rand::Rng;
use serde::Serialize;

use super::chaos::stream_rng;
use super::ifs::ClassicalIFS;
use super::space::{PhaseSpace, Point};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicityReport {
    /// Largest sampled ratio `d(f(x), f(y)) / d(x, y)` per map; a lower bound
    /// on the true Lipschitz constant.
    pub lipschitz: Vec<f64>,
    /// Smallest sampled value of each probability function.
    pub min_probability: Vec<f64>,
    pub contractive: bool,
    pub positive: bool,
    pub hyperbolic: bool,
    /// Always `"empirical"`: the verdict rests on finite sampling.
    pub basis: &'static str,
    pub samples: usize,
}

fn random_point(space: PhaseSpace, rng: &mut impl Rng) -> Point {
    match space {
        PhaseSpace::Interval => Point::Line(rng.random()),
        PhaseSpace::Square => Point::Plane([rng.random(), rng.random()]),
        PhaseSpace::Sphere => space.from_unit_coords([rng.random(), rng.random()]),
    }
}

/// A point within roughly `h` of `p`, staying inside the space.
fn nearby(p: &Point, h: f64, rng: &mut impl Rng) -> Point {
    let mut jitter = || h * (2.0 * rng.random::<f64>() - 1.0);
    match p {
        Point::Line(x) => Point::Line((x + jitter()).clamp(0.0, 1.0)),
        Point::Plane([x, y]) => Point::Plane([(x + jitter()).clamp(0.0, 1.0), (y + jitter()).clamp(0.0, 1.0)]),
        Point::Sphere(v) => {
            let w = [v[0] + jitter(), v[1] + jitter(), v[2] + jitter()];
            let n = super::space::norm3(&w);
            Point::Sphere([w[0] / n, w[1] / n, w[2] / n])
        }
    }
}

/// Deterministic probe points: a regular grid including the boundary (or
/// both poles on the sphere).
fn probe_grid(space: PhaseSpace, per_axis: usize) -> Vec<Point> {
    let n = per_axis.max(2);
    let t = |k: usize| k as f64 / (n - 1) as f64;
    match space {
        PhaseSpace::Interval => (0..n).map(|k| Point::Line(t(k))).collect(),
        _ => (0..n).flat_map(|i| (0..n).map(move |j| space.from_unit_coords([t(i), t(j)]))).collect(),
    }
}

/// Empirical check of the contraction and positivity conditions.
///
/// Half of the `budget` pairs are independent uniform pairs and half are
/// pairs at separations from 10⁻² down to 10⁻⁶, which expose local stretching.
/// Pairs on different continuity pieces of a map are skipped for that map.
pub fn classify_hyperbolic(ifs: &ClassicalIFS, budget: usize, seed: u64) -> Result<HyperbolicityReport> {
    let space = ifs.space();
    let mut rng = stream_rng(seed, 0);
    let mut lipschitz = vec![0.0f64; ifs.len()];
    let budget = budget.max(10);
    for s in 0..budget {
        let x = random_point(space, &mut rng);
        let y = if s % 2 == 0 {
            random_point(space, &mut rng)
        } else {
            let h = 10f64.powi(-2 - (s / 2 % 5) as i32);
            nearby(&x, h, &mut rng)
        };
        let d = space.distance(&x, &y);
        if !(d > 0.0) {
            continue;
        }
        for (l, map) in lipschitz.iter_mut().zip(ifs.maps()) {
            // ratios across a jump measure the jump, not the stretching
            if map.piece(&x) != map.piece(&y) {
                continue;
            }
            let r = space.distance(&map.apply(&x), &map.apply(&y)) / d;
            if r > *l {
                *l = r;
            }
        }
    }
    let mut min_probability = vec![f64::INFINITY; ifs.len()];
    let mut probes = probe_grid(space, if space.axes() == 1 { 1001 } else { 101 });
    probes.extend((0..budget.min(10_000)).map(|_| random_point(space, &mut rng)));
    for p in &probes {
        for (m, q) in min_probability.iter_mut().zip(ifs.probabilities(p)?) {
            *m = m.min(q);
        }
    }
    let contractive = lipschitz.iter().all(|&l| l < 1.0);
    let positive = min_probability.iter().all(|&p| p > 0.0);
    Ok(HyperbolicityReport {
        lipschitz,
        min_probability,
        contractive,
        positive,
        hyperbolic: contractive && positive,
        basis: "empirical",
        samples: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_is_hyperbolic_with_one_third() {
        let r = classify_hyperbolic(&ClassicalIFS::cantor(), 10_000, 1).unwrap();
        assert!(r.hyperbolic);
        for l in r.lipschitz {
            assert!((l - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn vanishing_probability_breaks_hyperbolicity() {
        let r = classify_hyperbolic(&ClassicalIFS::cantor_place_dependent(), 10_000, 1).unwrap();
        assert!(r.contractive);
        assert!(!r.positive);
        assert!(!r.hyperbolic);
    }

    #[test]
    fn expanding_maps_report_two() {
        let r = classify_hyperbolic(&ClassicalIFS::tent_bernoulli(), 10_000, 1).unwrap();
        assert!(!r.hyperbolic);
        for l in r.lipschitz {
            assert!((l - 2.0).abs() < 0.01, "{l}");
        }
    }

    #[test]
    fn rotations_are_isometries() {
        let r = classify_hyperbolic(&ClassicalIFS::random_rotations(1.0, 0.5), 5_000, 3).unwrap();
        assert!(!r.contractive);
        for l in r.lipschitz {
            assert!((l - 1.0).abs() < 1e-6);
        }
    }
}
