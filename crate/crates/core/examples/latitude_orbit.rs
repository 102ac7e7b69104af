//! Latitude-weighted spin rotations: the north pole is never rotated about x.

use qifs::linalg::max_abs;
use qifs::qstate::{DensityMatrix, PureState};
use qifs::quantum::{pure_barycenter, pure_trajectory};
use qifs::spin::{latitude_probabilities, latitude_rotations, spin_coherent, Spin};

fn main() -> qifs::Result<()> {
    let spin = Spin::new(5.0)?;
    let q = latitude_rotations(spin, 1.0, 0.7)?;
    for theta in [0.0, 0.5, 1.5] {
        let rho = DensityMatrix::from_ket(&spin_coherent(spin, theta, 0.0));
        let (p1, p2) = latitude_probabilities(spin, &rho)?;
        println!("θ = {theta}: p = ({p1:.4}, {p2:.4})");
    }
    let pole = PureState::new(spin_coherent(spin, 0.0, 0.0));
    let orbit = pure_trajectory(&q, &pole, 1000, 3)?;
    let p0 = pole.projector();
    let drift = orbit.iter().map(|s| max_abs(&(s.projector() - &p0))).fold(0.0, f64::max);
    println!("pole orbit: largest projector deviation over 1000 steps {drift:.1e}");
    let away = PureState::new(spin_coherent(spin, 1.2, 0.3));
    let b = pure_barycenter(&q, &away, 20_000, 100, 3)?;
    println!("barycenter from θ = 1.2: purity {:.4}", b.purity());
    Ok(())
}
