use serde::{Deserialize, Serialize};

use super::space::{norm3, PhaseSpace, Point};
use crate::error::{Error, Result};

/// A deterministic map of a phase space into itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassicalMap {
    /// `x ↦ a·x + b`
    #[serde(rename = "affine-1d")]
    Affine1D { a: f64, b: f64 },
    /// `v ↦ M·v + offset`
    #[serde(rename = "affine-2d")]
    Affine2D { matrix: [[f64; 2]; 2], offset: [f64; 2] },
    /// Right-handed rotation by `angle` radians about the unit `axis`.
    Rotation { axis: [f64; 3], angle: f64 },
    /// `2x` on `[0, 1/2)`, `2(1 − x)` on `[1/2, 1]`.
    Tent,
    /// `2x` on `[0, 1/2)`, `2x − 1` on `[1/2, 1]`.
    Bernoulli,
    /// Classical kicked top `R_z(zβ)·R_x(α)`: a rotation about x by α
    /// followed by a rotation about z through an angle `β·z`.
    KickedTop { alpha: f64, beta: f64 },
}

impl ClassicalMap {
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let n = norm3(&axis);
        ClassicalMap::Rotation { axis: [axis[0] / n, axis[1] / n, axis[2] / n], angle }
    }

    /// Rotation about the z axis.
    pub fn rotation_z(angle: f64) -> Self {
        ClassicalMap::Rotation { axis: [0.0, 0.0, 1.0], angle }
    }

    pub fn rotation_x(angle: f64) -> Self {
        ClassicalMap::Rotation { axis: [1.0, 0.0, 0.0], angle }
    }

    /// The space this kind of map acts on.
    pub fn space(&self) -> PhaseSpace {
        match self {
            ClassicalMap::Affine1D { .. } | ClassicalMap::Tent | ClassicalMap::Bernoulli => PhaseSpace::Interval,
            ClassicalMap::Affine2D { .. } => PhaseSpace::Square,
            ClassicalMap::Rotation { .. } | ClassicalMap::KickedTop { .. } => PhaseSpace::Sphere,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let ClassicalMap::Rotation { axis, .. } = self {
            if (norm3(axis) - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("rotation axis {axis:?} is not a unit vector")));
            }
        }
        Ok(())
    }

    /// 1-D maps that stretch distances; floating-point orbits of these lose
    /// low-order bits at every step.
    pub fn is_expanding(&self) -> bool {
        match self {
            ClassicalMap::Tent | ClassicalMap::Bernoulli => true,
            ClassicalMap::Affine1D { a, .. } => a.abs() > 1.0,
            _ => false,
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        match (self, p) {
            (ClassicalMap::Affine1D { a, b }, Point::Line(x)) => Point::Line(a * x + b),
            (ClassicalMap::Tent, Point::Line(x)) => Point::Line(if *x < 0.5 { 2.0 * x } else { 2.0 * (1.0 - x) }),
            (ClassicalMap::Bernoulli, Point::Line(x)) => Point::Line(if *x < 0.5 { 2.0 * x } else { 2.0 * x - 1.0 }),
            (ClassicalMap::Affine2D { matrix: m, offset }, Point::Plane([x, y])) => Point::Plane([
                m[0][0] * x + m[0][1] * y + offset[0],
                m[1][0] * x + m[1][1] * y + offset[1],
            ]),
            (ClassicalMap::Rotation { axis, angle }, Point::Sphere(v)) => Point::Sphere(rotate(v, axis, *angle)),
            (ClassicalMap::KickedTop { alpha, beta }, Point::Sphere(v)) => {
                let w = rotate(v, &[1.0, 0.0, 0.0], *alpha);
                Point::Sphere(rotate(&w, &[0.0, 0.0, 1.0], beta * w[2]))
            }
            _ => panic!("map {self:?} applied to a point of another space: {p:?}"),
        }
    }

    /// Index of the continuity piece containing `p`. Only the Bernoulli map
    /// has more than one piece (`[0, ½)` and `[½, 1]`).
    pub fn piece(&self, p: &Point) -> usize {
        match (self, p) {
            (ClassicalMap::Bernoulli, Point::Line(x)) => usize::from(*x >= 0.5),
            _ => 0,
        }
    }

    /// For invertible 1-D maps: the image interval `f(Ω)`.
    pub fn image_interval(&self) -> Option<(f64, f64)> {
        match self {
            ClassicalMap::Affine1D { a, b } if *a != 0.0 => {
                let (u, v) = (*b, a + b);
                Some((u.min(v), u.max(v)))
            }
            _ => None,
        }
    }

    /// For invertible 1-D maps: `(f⁻¹(x), |d f⁻¹/dx|)`, or `None` when the map
    /// is not invertible.
    pub fn inverse(&self, x: f64) -> Option<(f64, f64)> {
        match self {
            ClassicalMap::Affine1D { a, b } if *a != 0.0 => Some(((x - b) / a, 1.0 / a.abs())),
            _ => None,
        }
    }
}

/// Rodrigues rotation of `v` about the unit `axis`.
pub(crate) fn rotate(v: &[f64; 3], axis: &[f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
    let cross = [
        axis[1] * v[2] - axis[2] * v[1],
        axis[2] * v[0] - axis[0] * v[2],
        axis[0] * v[1] - axis[1] * v[0],
    ];
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = v[k] * c + cross[k] * s + axis[k] * dot * (1.0 - c);
    }
    // keep unit norm against drift over long orbits
    let n = norm3(&out);
    [out[0] / n, out[1] / n, out[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::space::from_spherical;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rotation_about_z_advances_azimuth() {
        let p = Point::Sphere(from_spherical(0.7, 0.2));
        let q = ClassicalMap::rotation_z(0.5).apply(&p);
        let expected = Point::Sphere(from_spherical(0.7, 0.7));
        assert!(PhaseSpace::Sphere.distance(&q, &expected) < 1e-14);
    }

    #[test]
    fn rotation_about_x_moves_z_towards_minus_y() {
        let q = ClassicalMap::rotation_x(FRAC_PI_2).apply(&Point::Sphere([0.0, 0.0, 1.0]));
        assert!(PhaseSpace::Sphere.distance(&q, &Point::Sphere([0.0, -1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn tent_and_bernoulli_values() {
        assert_eq!(ClassicalMap::Tent.apply(&Point::Line(0.75)), Point::Line(0.5));
        assert_eq!(ClassicalMap::Bernoulli.apply(&Point::Line(0.75)), Point::Line(0.5));
        assert_eq!(ClassicalMap::Tent.apply(&Point::Line(1.0)), Point::Line(0.0));
        assert_eq!(ClassicalMap::Bernoulli.apply(&Point::Line(0.25)), Point::Line(0.5));
    }

    #[test]
    fn kicked_top_twists_by_height() {
        // α = 0: pure z-rotation by β·z
        let p = Point::Sphere(from_spherical(0.5, 0.0));
        let q = ClassicalMap::KickedTop { alpha: 0.0, beta: 2.0 }.apply(&p);
        let expected = Point::Sphere(from_spherical(0.5, 2.0 * 0.5f64.cos()));
        assert!(PhaseSpace::Sphere.distance(&q, &expected) < 1e-14);
    }

    #[test]
    fn only_affine_maps_invert() {
        let f = ClassicalMap::Affine1D { a: 1.0 / 3.0, b: 2.0 / 3.0 };
        let (x, jac) = f.inverse(0.7).unwrap();
        assert!((x - 0.1).abs() < 1e-14 && (jac - 3.0).abs() < 1e-14);
        assert!(ClassicalMap::Tent.inverse(0.2).is_none());
    }

    #[test]
    fn json_form() {
        let m: ClassicalMap = serde_json::from_str(r#"{"kind":"affine-1d","a":0.5,"b":0.0}"#).unwrap();
        assert_eq!(m, ClassicalMap::Affine1D { a: 0.5, b: 0.0 });
        assert!(serde_json::from_str::<ClassicalMap>(r#"{"kind":"affine-1d","a":0.5,"b":0.0,"c":1}"#).is_err());
    }
}
