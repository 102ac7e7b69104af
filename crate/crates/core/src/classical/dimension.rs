use serde::Serialize;

use super::measure::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::linalg::linear_fit;

/// Cells lighter than this fraction of the total count as empty.
pub const OCCUPANCY_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    /// Least-squares slope of `ln N(ε)` against `ln(1/ε)`.
    pub dimension: f64,
    /// Root-mean-square residual of that fit.
    pub residual: f64,
    pub r_squared: f64,
    /// `(1/ε, occupied boxes)` per scale.
    pub counts: Vec<(usize, usize)>,
}

/// Boxes per axis `b^1, …, b^levels`.
pub fn geometric_scales(base: usize, levels: u32) -> Vec<usize> {
    (1..=levels).map(|l| base.pow(l)).collect()
}

/// Box-counting dimension of the support of `mu`.
///
/// `boxes_per_axis` lists `1/ε` for each scale; every entry must divide the
/// grid resolution so the boxes are unions of cells.
pub fn box_counting_dimension(mu: &EmpiricalMeasure, boxes_per_axis: &[usize]) -> Result<DimensionEstimate> {
    if boxes_per_axis.len() < 3 {
        return Err(Error::Invalid(format!("{} scales given; a slope fit needs at least 3", boxes_per_axis.len())));
    }
    let total = mu.total();
    if !(total > 0.0) {
        return Err(Error::Invalid("box counting needs a measure with positive mass".into()));
    }
    let m = mu.resolution();
    let mut counts = Vec::with_capacity(boxes_per_axis.len());
    for &b in boxes_per_axis {
        if b == 0 || !m.is_multiple_of(b) {
            return Err(Error::Invalid(format!("{b} boxes per axis do not tile a grid of {m} cells")));
        }
        let coarse = mu.coarsen(m / b)?;
        let occupied = coarse.weights().iter().filter(|&&w| w > total * OCCUPANCY_THRESHOLD).count();
        counts.push((b, occupied));
    }
    let x: Vec<f64> = counts.iter().map(|(b, _)| (*b as f64).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|(_, n)| (*n.max(&1) as f64).ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y);
    let residual =
        (x.iter().zip(&y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    Ok(DimensionEstimate { dimension: slope, residual, r_squared: r2, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::space::PhaseSpace;

    #[test]
    fn full_interval_has_dimension_one() {
        let mu = EmpiricalMeasure::uniform(PhaseSpace::Interval, 729);
        let d = box_counting_dimension(&mu, &geometric_scales(3, 6)).unwrap();
        assert!((d.dimension - 1.0).abs() < 1e-12);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn exact_cantor_grid_gives_log2_over_log3() {
        // occupied cells of the level-6 Cantor construction
        let w: Vec<f64> = (0..729usize)
            .map(|k| {
                let mut a = k;
                for _ in 0..6 {
                    if a % 3 == 1 {
                        return 0.0;
                    }
                    a /= 3;
                }
                1.0
            })
            .collect();
        let mu = EmpiricalMeasure::from_weights(PhaseSpace::Interval, 729, w).unwrap();
        let d = box_counting_dimension(&mu, &geometric_scales(3, 6)).unwrap();
        assert!((d.dimension - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn scale_checks() {
        let mu = EmpiricalMeasure::uniform(PhaseSpace::Interval, 100);
        assert!(box_counting_dimension(&mu, &[2, 4]).is_err());
        assert!(box_counting_dimension(&mu, &[2, 3, 4]).is_err());
    }
}
