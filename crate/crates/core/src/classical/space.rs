use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three compact phase spaces supported by the classical engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSpace {
    /// `[0, 1]` with the Euclidean metric.
    Interval,
    /// `[0, 1]²` with the Euclidean metric.
    Square,
    /// The unit sphere S² with the great-circle metric.
    Sphere,
}

/// A point of a [`PhaseSpace`]. Sphere points are unit vectors in ℝ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Line(f64),
    Plane([f64; 2]),
    Sphere([f64; 3]),
}

impl PhaseSpace {
    /// Number of histogram axes.
    pub fn axes(self) -> usize {
        match self {
            PhaseSpace::Interval => 1,
            _ => 2,
        }
    }

    pub fn contains(self, p: &Point) -> bool {
        match (self, p) {
            (PhaseSpace::Interval, Point::Line(x)) => (0.0..=1.0).contains(x),
            (PhaseSpace::Square, Point::Plane([x, y])) => (0.0..=1.0).contains(x) && (0.0..=1.0).contains(y),
            (PhaseSpace::Sphere, Point::Sphere(v)) => (norm3(v) - 1.0).abs() <= 1e-12,
            _ => false,
        }
    }

    pub fn distance(self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Line(x), Point::Line(y)) => (x - y).abs(),
            (Point::Plane(p), Point::Plane(q)) => (p[0] - q[0]).hypot(p[1] - q[1]),
            (Point::Sphere(u), Point::Sphere(v)) => great_circle(u, v),
            _ => f64::NAN,
        }
    }

    /// Parse I/O coordinates: `[x]`, `[x, y]`, or spherical `[θ, φ]`.
    pub fn point_from_coords(self, coords: &[f64]) -> Result<Point> {
        let p = match (self, coords) {
            (PhaseSpace::Interval, [x]) => Point::Line(*x),
            (PhaseSpace::Square, [x, y]) => Point::Plane([*x, *y]),
            (PhaseSpace::Sphere, [theta, phi]) => Point::Sphere(from_spherical(*theta, *phi)),
            _ => {
                return Err(Error::Invalid(format!(
                    "{} coordinates do not describe a point of {:?}",
                    coords.len(),
                    self
                )))
            }
        };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::Invalid(format!("{p:?} lies outside {self:?}")))
        }
    }

    /// Histogram coordinates in `[0, 1]^axes`. For the sphere these are
    /// `((1 − z)/2, φ/2π)`, an equal-area chart whose first axis grows with θ.
    pub fn unit_coords(self, p: &Point) -> [f64; 2] {
        match p {
            Point::Line(x) => [*x, 0.0],
            Point::Plane(q) => *q,
            Point::Sphere(v) => {
                let phi = v[1].atan2(v[0]).rem_euclid(std::f64::consts::TAU);
                [((1.0 - v[2]) * 0.5).clamp(0.0, 1.0), phi / std::f64::consts::TAU]
            }
        }
    }

    /// Inverse of [`PhaseSpace::unit_coords`].
    pub fn from_unit_coords(self, u: [f64; 2]) -> Point {
        match self {
            PhaseSpace::Interval => Point::Line(u[0]),
            PhaseSpace::Square => Point::Plane(u),
            PhaseSpace::Sphere => {
                let z = 1.0 - 2.0 * u[0];
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = std::f64::consts::TAU * u[1];
                Point::Sphere([r * phi.cos(), r * phi.sin(), z])
            }
        }
    }
}

impl Point {
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Line(x) => vec![*x],
            Point::Plane(p) => p.to_vec(),
            Point::Sphere(v) => v.to_vec(),
        }
    }

    /// `cos θ` for a sphere point (its z coordinate).
    pub fn cos_theta(&self) -> Option<f64> {
        match self {
            Point::Sphere(v) => Some(v[2]),
            _ => None,
        }
    }
}

pub fn from_spherical(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn great_circle(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    // atan2 form stays accurate for nearby points
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    norm3(&cross).atan2(dot)
}
