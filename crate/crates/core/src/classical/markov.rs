//! Grid discretizations of the Markov operator on measures and densities.

use super::ifs::ClassicalIFS;
use super::maps::ClassicalMap;
use super::measure::EmpiricalMeasure;
use super::space::{PhaseSpace, Point};
use crate::error::{Error, Result};

/// Tolerance on the midpoint-rule normalization of a density.
pub const DENSITY_NORM_TOL: f64 = 1e-6;

/// One step of the Markov operator on a grid measure.
///
/// Each cell's mass is sent through every map to the cell holding the image
/// of the cell center, weighted by `pᵢ` at the center. First-order accurate
/// in the cell width.
pub fn push_measure(ifs: &ClassicalIFS, mu: &EmpiricalMeasure) -> Result<EmpiricalMeasure> {
    if mu.space() != ifs.space() {
        return Err(Error::Invalid(format!("measure on {:?} pushed by an IFS on {:?}", mu.space(), ifs.space())));
    }
    let mut out = EmpiricalMeasure::zeros(mu.space(), mu.resolution());
    for (k, &w) in mu.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let c = mu.cell_center(k);
        let ps = ifs.probabilities(&c)?;
        // renormalize so the per-cell split is exact up to rounding
        let s: f64 = ps.iter().sum();
        for (map, p) in ifs.maps().iter().zip(&ps) {
            if *p > 0.0 {
                out.add_mass(out.cell_of(&map.apply(&c)), w * p / s);
            }
        }
    }
    Ok(out)
}

/// `n` successive applications of [`push_measure`].
pub fn push_measure_n(ifs: &ClassicalIFS, mu: &EmpiricalMeasure, n: usize) -> Result<EmpiricalMeasure> {
    let mut m = mu.clone();
    for _ in 0..n {
        m = push_measure(ifs, &m)?;
    }
    Ok(m)
}

/// A density on `[0, 1]` sampled at the centers `(k + ½)/n` of `n` equal cells.
///
/// Integrals use the midpoint rule; between centers the density is linear and
/// beyond the outermost centers it is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("density grid needs at least one cell".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Invalid("density values must be finite and nonnegative".into()));
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Self {
        Self { values: vec![1.0; n.max(1)] }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|k| f((k as f64 + 0.5) / n as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.values.len() as f64
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Piecewise-linear value at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = x * n as f64 - 0.5;
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let k = t.floor() as usize;
        let f = t - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }
}

/// One step of the density evolution
/// `P[γ](x) = Σ_{i: x ∈ fᵢ(Ω)} pᵢ(fᵢ⁻¹x) γ(fᵢ⁻¹x) |d fᵢ⁻¹/dx|`.
///
/// Only affine maps on the interval are accepted. The result is exact at the
/// nodes for piecewise-linear input; the output integral is checked against
/// one within [`DENSITY_NORM_TOL`] and the grid should be aligned with the
/// image endpoints for that to hold.
pub fn push_density(ifs: &ClassicalIFS, gamma: &DensityGrid) -> Result<DensityGrid> {
    if ifs.space() != PhaseSpace::Interval {
        return Err(Error::Invalid("density evolution is defined on the interval only".into()));
    }
    if let Some(m) = ifs.maps().iter().find(|m| m.image_interval().is_none()) {
        return Err(Error::Invalid(format!("map {m:?} is not invertible")));
    }
    let mass = gamma.integral();
    if (mass - 1.0).abs() > DENSITY_NORM_TOL {
        return Err(Error::NotNormalized(mass));
    }
    let n = gamma.len();
    let mut out = vec![0.0; n];
    for (k, v) in out.iter_mut().enumerate() {
        let x = gamma.node(k);
        for (i, map) in ifs.maps().iter().enumerate() {
            let (lo, hi) = map.image_interval().expect("checked above");
            if x < lo || x > hi {
                continue;
            }
            let (y, jac) = map.inverse(x).expect("checked above");
            let y = y.clamp(0.0, 1.0);
            let p = ifs.probability_functions()[i].eval(&Point::Line(y));
            *v += p * gamma.eval(y) * jac;
        }
    }
    let out = DensityGrid::new(out)?;
    let mass = out.integral();
    if (mass - 1.0).abs() > DENSITY_NORM_TOL {
        return Err(Error::NotNormalized(mass));
    }
    Ok(out)
}

/// True when every map is affine and therefore usable with [`push_density`].
pub fn supports_density(ifs: &ClassicalIFS) -> bool {
    ifs.maps().iter().all(|m| matches!(m, ClassicalMap::Affine1D { a, .. } if *a != 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ifs::ProbabilityFunction;

    #[test]
    fn delta_at_zero_splits_between_two_cells() {
        let ifs = ClassicalIFS::cantor();
        let mu = EmpiricalMeasure::point_mass(PhaseSpace::Interval, 243, &Point::Line(0.0));
        let out = push_measure(&ifs, &mu).unwrap();
        let w = out.normalized();
        assert!((w[0] - 0.5).abs() < 1e-15);
        assert!((w[out.cell_of(&Point::Line(2.0 / 3.0))] - 0.5).abs() < 1e-15);
        assert!((out.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cantor_cylinders_carry_equal_mass() {
        let ifs = ClassicalIFS::cantor();
        let out = push_measure_n(&ifs, &EmpiricalMeasure::uniform(PhaseSpace::Interval, 243), 20).unwrap();
        let w = out.normalized();
        // level-3 cylinders are 9 cells wide; the oracle lists their left ends in ternary
        for a in 0..27usize {
            let digits = [a / 9, (a / 3) % 3, a % 3];
            let mass: f64 = w[a * 9..a * 9 + 9].iter().sum();
            if digits.iter().all(|&d| d != 1) {
                assert!((mass - 0.125).abs() < 1e-12, "cylinder {a}: {mass}");
            } else {
                assert!(mass.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tent_bernoulli_keeps_uniform_up_to_pair_merging() {
        let ifs = ClassicalIFS::tent_bernoulli();
        let out = push_measure(&ifs, &EmpiricalMeasure::uniform(PhaseSpace::Interval, 100)).unwrap();
        for w in out.coarsen(2).unwrap().normalized() {
            assert!((w - 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn cantor_density_is_three_halves_on_outer_thirds() {
        let ifs = ClassicalIFS::cantor();
        let g = push_density(&ifs, &DensityGrid::uniform(300)).unwrap();
        for (k, v) in g.values().iter().enumerate() {
            let x = g.node(k);
            let want = if x > 1.0 / 3.0 && x < 2.0 / 3.0 { 0.0 } else { 1.5 };
            assert!((v - want).abs() < 1e-12, "x = {x}");
        }
        assert!((g.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_map_leaves_density_alone() {
        let ifs = ClassicalIFS::with_constant_probabilities(
            PhaseSpace::Interval,
            vec![ClassicalMap::Affine1D { a: 1.0, b: 0.0 }],
            &[1.0],
        )
        .unwrap();
        let g = DensityGrid::from_fn(200, |x| 2.0 * x).unwrap();
        let out = push_density(&ifs, &g).unwrap();
        for (a, b) in out.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn place_dependent_density_is_linear_in_each_third() {
        let ifs = ClassicalIFS::cantor_place_dependent();
        let g = push_density(&ifs, &DensityGrid::uniform(300)).unwrap();
        for (k, v) in g.values().iter().enumerate() {
            let x = g.node(k);
            let want = if x < 1.0 / 3.0 {
                9.0 * x
            } else if x > 2.0 / 3.0 {
                9.0 * (1.0 - x)
            } else {
                0.0
            };
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn non_invertible_maps_are_rejected() {
        assert!(push_density(&ClassicalIFS::tent_bernoulli(), &DensityGrid::uniform(10)).is_err());
        let ifs = ClassicalIFS::new(
            PhaseSpace::Interval,
            vec![ClassicalMap::Affine1D { a: 0.5, b: 0.0 }, ClassicalMap::Affine1D { a: 0.5, b: 0.5 }],
            vec![ProbabilityFunction::constant(0.5); 2],
        )
        .unwrap();
        assert!(supports_density(&ifs));
        assert!(push_density(&ifs, &DensityGrid::new(vec![3.0; 4]).unwrap()).is_err());
    }
}
