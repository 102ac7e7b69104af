//! Uniqueness of the invariant state of a unitary family via its commutant.

use qifs::classical::chaos::stream_rng;
use qifs::invariant::{permuted_direct_sum, uniqueness_verdict};
use qifs::linalg;
use qifs::spin::{rotation, Axis, Spin};

fn main() -> qifs::Result<()> {
    let mut rng = stream_rng(4, 0);
    let spin = Spin::new(2.0)?;
    let us = vec![rotation(spin, Axis::Z, 1.0), rotation(spin, Axis::X, 0.7)];
    let rep = uniqueness_verdict(&[0.5, 0.5], &us, 1e-8, &mut rng)?;
    println!(
        "spin-2 rotations: commutant dim {}, fixed multiplicity {}, unique {}",
        rep.commutant_dimension, rep.fixed_multiplicity, rep.unique
    );

    // a family that preserves the split {0, 3} ⊕ {1, 2} of C⁴
    let perm = [0, 3, 1, 2];
    let us: Vec<_> = (0..3)
        .map(|_| permuted_direct_sum(&linalg::haar_unitary(2, &mut rng), &linalg::haar_unitary(2, &mut rng), &perm))
        .collect();
    let rep = uniqueness_verdict(&[0.2, 0.3, 0.5], &us, 1e-8, &mut rng)?;
    println!(
        "block family: commutant dim {}, blocks {:?}, unique {}, direct-sum residual {:.1e}",
        rep.commutant_dimension,
        rep.commutant.blocks,
        rep.unique,
        rep.direct_sum_residual.unwrap_or(f64::NAN)
    );
    Ok(())
}
