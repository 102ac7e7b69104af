use serde::{Deserialize, Serialize};

use super::maps::ClassicalMap;
use super::space::{PhaseSpace, Point};
use crate::error::{Error, Result};

/// Probability of selecting a map, possibly depending on the current point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbabilityFunction {
    Constant { value: f64 },
    /// `p(x) = x` on the interval.
    Linear,
    /// `p(x) = 1 − x` on the interval.
    OneMinusLinear,
    /// `p(θ) = (1 + cos θ)/2` on the sphere.
    LatitudeNorth,
    /// `p(θ) = (1 − cos θ)/2` on the sphere.
    LatitudeSouth,
}

impl ProbabilityFunction {
    pub fn constant(value: f64) -> Self {
        ProbabilityFunction::Constant { value }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match (self, p) {
            (ProbabilityFunction::Constant { value }, _) => *value,
            (ProbabilityFunction::Linear, Point::Line(x)) => *x,
            (ProbabilityFunction::OneMinusLinear, Point::Line(x)) => 1.0 - x,
            (ProbabilityFunction::LatitudeNorth, Point::Sphere(v)) => 0.5 * (1.0 + v[2]),
            (ProbabilityFunction::LatitudeSouth, Point::Sphere(v)) => 0.5 * (1.0 - v[2]),
            _ => f64::NAN,
        }
    }

    fn compatible(&self, space: PhaseSpace) -> bool {
        match self {
            ProbabilityFunction::Constant { .. } => true,
            ProbabilityFunction::Linear | ProbabilityFunction::OneMinusLinear => space == PhaseSpace::Interval,
            ProbabilityFunction::LatitudeNorth | ProbabilityFunction::LatitudeSouth => space == PhaseSpace::Sphere,
        }
    }
}

/// Tolerance on `Σ pᵢ(x) = 1`.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// A phase space with `k` maps and `k` selection probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IfsSpec", into = "IfsSpec")]
pub struct ClassicalIFS {
    space: PhaseSpace,
    maps: Vec<ClassicalMap>,
    probs: Vec<ProbabilityFunction>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsSpec {
    space: PhaseSpace,
    maps: Vec<ClassicalMap>,
    probs: Vec<ProbabilityFunction>,
}

impl TryFrom<IfsSpec> for ClassicalIFS {
    type Error = Error;
    fn try_from(s: IfsSpec) -> Result<Self> {
        ClassicalIFS::new(s.space, s.maps, s.probs)
    }
}

impl From<ClassicalIFS> for IfsSpec {
    fn from(i: ClassicalIFS) -> Self {
        IfsSpec { space: i.space, maps: i.maps, probs: i.probs }
    }
}

impl ClassicalIFS {
    pub fn new(space: PhaseSpace, maps: Vec<ClassicalMap>, probs: Vec<ProbabilityFunction>) -> Result<Self> {
        if maps.is_empty() || maps.len() != probs.len() {
            return Err(Error::Invalid(format!("{} maps with {} probability functions", maps.len(), probs.len())));
        }
        for m in &maps {
            if m.space() != space {
                return Err(Error::Invalid(format!("map {m:?} does not act on {space:?}")));
            }
            m.validate()?;
        }
        for p in &probs {
            if !p.compatible(space) {
                return Err(Error::Invalid(format!("probability {p:?} is not defined on {space:?}")));
            }
            if let ProbabilityFunction::Constant { value } = p {
                if !(0.0..=1.0).contains(value) {
                    return Err(Error::Invalid(format!("constant probability {value} outside [0, 1]")));
                }
            }
        }
        let ifs = Self { space, maps, probs };
        // constant families are checked up front; place-dependent ones per visited point
        if ifs.probs.iter().all(|p| matches!(p, ProbabilityFunction::Constant { .. })) {
            let x = ifs.space.from_unit_coords([0.5, 0.5]);
            ifs.probabilities(&x)?;
        }
        Ok(ifs)
    }

    /// Constant probabilities `ps` for the given maps.
    pub fn with_constant_probabilities(space: PhaseSpace, maps: Vec<ClassicalMap>, ps: &[f64]) -> Result<Self> {
        Self::new(space, maps, ps.iter().map(|&p| ProbabilityFunction::constant(p)).collect())
    }

    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    pub fn maps(&self) -> &[ClassicalMap] {
        &self.maps
    }

    pub fn probability_functions(&self) -> &[ProbabilityFunction] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `(p₁(x), …, p_k(x))`, failing unless they sum to one.
    pub fn probabilities(&self, x: &Point) -> Result<Vec<f64>> {
        let ps: Vec<f64> = self.probs.iter().map(|p| p.eval(x)).collect();
        let sum: f64 = ps.iter().sum();
        if !((sum - 1.0).abs() <= PROBABILITY_SUM_TOL) || ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Probability { sum, location: format!("{x:?}") });
        }
        Ok(ps)
    }

    // ---- the classical examples ----

    fn cantor_maps() -> Vec<ClassicalMap> {
        vec![ClassicalMap::Affine1D { a: 1.0 / 3.0, b: 0.0 }, ClassicalMap::Affine1D { a: 1.0 / 3.0, b: 2.0 / 3.0 }]
    }

    /// Middle-thirds Cantor IFS with equal weights.
    pub fn cantor() -> Self {
        Self::with_constant_probabilities(PhaseSpace::Interval, Self::cantor_maps(), &[0.5, 0.5]).unwrap()
    }

    /// Cantor maps with `p₁(x) = x`, `p₂(x) = 1 − x`.
    pub fn cantor_place_dependent() -> Self {
        Self::new(
            PhaseSpace::Interval,
            Self::cantor_maps(),
            vec![ProbabilityFunction::Linear, ProbabilityFunction::OneMinusLinear],
        )
        .unwrap()
    }

    /// The classical tartan: four one-axis contractions of the square.
    pub fn tartan() -> Self {
        let t = 1.0 / 3.0;
        let maps = vec![
            ClassicalMap::Affine2D { matrix: [[t, 0.0], [0.0, 1.0]], offset: [0.0, 0.0] },
            ClassicalMap::Affine2D { matrix: [[t, 0.0], [0.0, 1.0]], offset: [2.0 / 3.0, 0.0] },
            ClassicalMap::Affine2D { matrix: [[1.0, 0.0], [0.0, t]], offset: [0.0, 0.0] },
            ClassicalMap::Affine2D { matrix: [[1.0, 0.0], [0.0, t]], offset: [0.0, 2.0 / 3.0] },
        ];
        Self::with_constant_probabilities(PhaseSpace::Square, maps, &[0.25; 4]).unwrap()
    }

    /// Rotation by `chi1` about z and by `chi2` about an axis
    /// inclined by `inclination` from z (in the x–z plane).
    pub fn sphere_rotations(chi1: f64, chi2: f64, inclination: f64) -> Self {
        let maps = vec![
            ClassicalMap::rotation_z(chi1),
            ClassicalMap::rotation([inclination.sin(), 0.0, inclination.cos()], chi2),
        ];
        Self::with_constant_probabilities(PhaseSpace::Sphere, maps, &[0.5, 0.5]).unwrap()
    }

    /// Tent and Bernoulli maps with equal weights.
    pub fn tent_bernoulli() -> Self {
        Self::with_constant_probabilities(PhaseSpace::Interval, vec![ClassicalMap::Tent, ClassicalMap::Bernoulli], &[0.5, 0.5])
            .unwrap()
    }

    /// `R_z(θ₁)`, `R_x(θ₂)` with equal weights.
    pub fn random_rotations(theta1: f64, theta2: f64) -> Self {
        let maps = vec![ClassicalMap::rotation_z(theta1), ClassicalMap::rotation_x(theta2)];
        Self::with_constant_probabilities(PhaseSpace::Sphere, maps, &[0.5, 0.5]).unwrap()
    }

    /// The rotations of [`Self::random_rotations`] chosen with latitude-dependent
    /// probabilities `(1 ± cos θ)/2`.
    pub fn latitude_rotations(theta1: f64, theta2: f64) -> Self {
        let maps = vec![ClassicalMap::rotation_z(theta1), ClassicalMap::rotation_x(theta2)];
        Self::new(
            PhaseSpace::Sphere,
            maps,
            vec![ProbabilityFunction::LatitudeNorth, ProbabilityFunction::LatitudeSouth],
        )
        .unwrap()
    }

    /// The randomly kicked classical top.
    pub fn random_kicked_top(alpha: f64, beta: f64, delta: f64) -> Self {
        let maps = vec![
            ClassicalMap::KickedTop { alpha, beta },
            ClassicalMap::KickedTop { alpha, beta: beta + delta },
        ];
        Self::with_constant_probabilities(PhaseSpace::Sphere, maps, &[0.5, 0.5]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_definitions() {
        let maps = vec![ClassicalMap::Tent];
        assert!(ClassicalIFS::with_constant_probabilities(PhaseSpace::Interval, maps.clone(), &[0.5, 0.5]).is_err());
        assert!(ClassicalIFS::with_constant_probabilities(PhaseSpace::Interval, maps.clone(), &[0.5]).is_err());
        assert!(ClassicalIFS::with_constant_probabilities(PhaseSpace::Sphere, maps, &[1.0]).is_err());
        let bad_axis = vec![ClassicalMap::Rotation { axis: [1.0, 1.0, 0.0], angle: 0.1 }];
        assert!(ClassicalIFS::with_constant_probabilities(PhaseSpace::Sphere, bad_axis, &[1.0]).is_err());
        assert!(ClassicalIFS::new(PhaseSpace::Square, vec![ClassicalMap::Affine2D { matrix: [[1.0, 0.0], [0.0, 1.0]], offset: [0.0; 2] }], vec![ProbabilityFunction::Linear]).is_err());
    }

    #[test]
    fn place_dependent_probabilities_sum_to_one() {
        let ifs = ClassicalIFS::cantor_place_dependent();
        for k in 0..=100 {
            let ps = ifs.probabilities(&Point::Line(k as f64 / 100.0)).unwrap();
            assert!((ps.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        let sphere = ClassicalIFS::latitude_rotations(1.0, 0.7);
        let ps = sphere.probabilities(&Point::Sphere([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(ps, vec![1.0, 0.0]);
    }

    #[test]
    fn json_round_trip() {
        let ifs = ClassicalIFS::tartan();
        let text = serde_json::to_string(&ifs).unwrap();
        let back: ClassicalIFS = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ifs);
    }
}
