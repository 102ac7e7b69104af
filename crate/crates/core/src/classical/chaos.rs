//! The random iterated algorithm ("chaos game").

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ifs::ClassicalIFS;
use super::measure::EmpiricalMeasure;
use super::space::Point;
use crate::error::{Error, Result};

/// Amplitude of the low-order refill applied after expanding 1-D maps.
const REFILL: f64 = 1.0 / (1u64 << 48) as f64;

#[derive(Clone, Debug)]
pub struct ChaosGameOptions {
    /// Steps discarded from each stream before binning.
    pub burn_in: usize,
    /// Histogram cells per axis.
    pub resolution: usize,
    /// Independent seeded streams; the result depends on this count but not
    /// on the number of worker threads.
    pub streams: usize,
    /// How many post-burn-in points of stream 0 to return.
    pub keep_trajectory: usize,
}

impl Default for ChaosGameOptions {
    fn default() -> Self {
        Self { burn_in: 100, resolution: 243, streams: 1, keep_trajectory: 1000 }
    }
}

#[derive(Clone, Debug)]
pub struct ChaosGameResult {
    pub trajectory: Vec<Point>,
    pub measure: EmpiricalMeasure,
}

/// Inverse-CDF selection with ties resolved towards the lower index.
pub(crate) fn select_index(u: f64, probs: &[f64]) -> usize {
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    // u landed in the rounding gap above the last partial sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Seeded generator for stream `stream` of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run the chaos game for `n` binned points from `x0`.
///
/// Every step draws one uniform for the map index; expanding 1-D maps draw a
/// second uniform for a refill below 2⁻⁴⁸, standing in for the digits of the
/// starting point that double precision cannot hold.
pub fn chaos_game(ifs: &ClassicalIFS, x0: &Point, n: usize, seed: u64, opts: &ChaosGameOptions) -> Result<ChaosGameResult> {
    if n == 0 {
        return Err(Error::Invalid("chaos game needs at least one iteration".into()));
    }
    if !ifs.space().contains(x0) {
        return Err(Error::Invalid(format!("starting point {x0:?} is outside {:?}", ifs.space())));
    }
    let streams = opts.streams.max(1);
    let parts: Vec<Result<ChaosGameResult>> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let budget = n / streams + usize::from(s < n % streams);
            run_stream(ifs, x0, budget, stream_rng(seed, s as u64), opts, if s == 0 { opts.keep_trajectory } else { 0 })
        })
        .collect();
    let mut measure = EmpiricalMeasure::zeros(ifs.space(), opts.resolution);
    let mut trajectory = Vec::new();
    for part in parts {
        let part = part?;
        measure.merge(&part.measure)?;
        if trajectory.is_empty() {
            trajectory = part.trajectory;
        }
    }
    Ok(ChaosGameResult { trajectory, measure })
}

fn run_stream(
    ifs: &ClassicalIFS,
    x0: &Point,
    budget: usize,
    mut rng: ChaCha8Rng,
    opts: &ChaosGameOptions,
    keep: usize,
) -> Result<ChaosGameResult> {
    let mut measure = EmpiricalMeasure::zeros(ifs.space(), opts.resolution);
    let mut trajectory = Vec::with_capacity(keep.min(budget));
    let mut x = *x0;
    for step in 0..opts.burn_in + budget {
        let probs = ifs.probabilities(&x)?;
        let i = select_index(rng.random::<f64>(), &probs);
        let map = &ifs.maps()[i];
        x = map.apply(&x);
        if map.is_expanding() {
            if let Point::Line(v) = x {
                let y = v + REFILL * rng.random::<f64>();
                x = Point::Line(if y > 1.0 { 2.0 - y } else { y });
            }
        }
        if step >= opts.burn_in {
            measure.add_point(&x);
            if trajectory.len() < keep {
                trajectory.push(x);
            }
        }
    }
    Ok(ChaosGameResult { trajectory, measure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::maps::ClassicalMap;
    use crate::classical::space::PhaseSpace;

    #[test]
    fn selection_follows_cumulative_sums() {
        let p = [0.25, 0.25, 0.5];
        assert_eq!(select_index(0.0, &p), 0);
        assert_eq!(select_index(0.25, &p), 1);
        assert_eq!(select_index(0.4999, &p), 1);
        assert_eq!(select_index(0.5, &p), 2);
        assert_eq!(select_index(1.0, &[0.5, 0.5, 0.0]), 1);
    }

    #[test]
    fn single_contraction_concentrates_at_fixed_point() {
        let ifs = ClassicalIFS::with_constant_probabilities(
            PhaseSpace::Interval,
            vec![ClassicalMap::Affine1D { a: 1.0 / 3.0, b: 0.0 }],
            &[1.0],
        )
        .unwrap();
        let opts = ChaosGameOptions { resolution: 100, ..Default::default() };
        let r = chaos_game(&ifs, &Point::Line(0.9), 10_000, 1, &opts).unwrap();
        assert_eq!(r.measure.weights()[0], 10_000.0);
    }

    #[test]
    fn identical_seeds_reproduce_bit_for_bit() {
        let ifs = ClassicalIFS::tartan();
        let opts = ChaosGameOptions { resolution: 27, streams: 4, ..Default::default() };
        let a = chaos_game(&ifs, &Point::Plane([0.5, 0.5]), 50_000, 9, &opts).unwrap();
        let b = chaos_game(&ifs, &Point::Plane([0.5, 0.5]), 50_000, 9, &opts).unwrap();
        assert_eq!(a.measure, b.measure);
        assert_eq!(a.trajectory, b.trajectory);
        let c = chaos_game(&ifs, &Point::Plane([0.5, 0.5]), 50_000, 10, &opts).unwrap();
        assert_ne!(a.measure, c.measure);
    }

    #[test]
    fn rejects_bad_arguments() {
        let ifs = ClassicalIFS::cantor();
        let opts = ChaosGameOptions::default();
        assert!(chaos_game(&ifs, &Point::Line(0.5), 0, 1, &opts).is_err());
        assert!(chaos_game(&ifs, &Point::Line(2.0), 10, 1, &opts).is_err());
    }
}
